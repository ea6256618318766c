"""Generic rigidity in the plane via the (2,3)-pebble game.

Every vertex starts with two pebbles.  An edge ``uv`` is independent of the
accepted edges iff four pebbles can be collected on ``{u, v}`` by reversing
directed paths; it is then accepted and oriented away from the vertex that
pays a pebble for it.  ``pebbles[v] + outdegree(v) == 2`` throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _edges_of(graph) -> tuple[list[int], list[Edge]]:
    """Accept a PlaneGraph, a ``(vertices, edges)`` pair, or anything with
    ``vertices``/``edges`` attributes."""
    if hasattr(graph, "vertices") and hasattr(graph, "edges"):
        return list(graph.vertices), [tuple(e) for e in graph.edges]
    vertices, edges = graph
    if isinstance(vertices, int):
        vertices = range(vertices)
    return list(vertices), [tuple(e) for e in edges]


class PebbleState:
    """Mutable state of the (2,3)-pebble game on a fixed vertex set."""

    def __init__(self, vertices: Iterable[int]):
        self.pebbles: dict[int, int] = {v: 2 for v in vertices}
        self.out: dict[int, set[int]] = {v: set() for v in self.pebbles}
        self.accepted: list[Edge] = []
        self.rejected: list[Edge] = []

    def copy(self) -> "PebbleState":
        other = PebbleState(())
        other.pebbles = dict(self.pebbles)
        other.out = {v: set(s) for v, s in self.out.items()}
        other.accepted = list(self.accepted)
        other.rejected = list(self.rejected)
        return other

    @property
    def orientation(self) -> list[Edge]:
        return sorted((u, w) for u, s in self.out.items() for w in s)

    def free(self) -> int:
        return sum(self.pebbles.values())

    def _find_pebble(self, start: int, blocked: set[int]) -> bool:
        """Move one pebble onto ``start`` along a reversed directed path,
        never taking pebbles from ``blocked``."""
        parent = {start: None}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in self.out[u]:
                if w in parent:
                    continue
                parent[w] = u
                if self.pebbles[w] > 0 and w not in blocked:
                    self.pebbles[w] -= 1
                    # reverse the path start -> ... -> w
                    x = w
                    while parent[x] is not None:
                        p = parent[x]
                        self.out[p].discard(x)
                        self.out[x].add(p)
                        x = p
                    self.pebbles[start] += 1
                    return True
                stack.append(w)
        return False

    def gather(self, targets: Iterable[int], want: dict[int, int] | None = None) -> int:
        """Collect up to ``want[v]`` (default 2) pebbles on each target,
        keeping pebbles already on other targets.  Returns the total held."""
        targets = list(targets)
        want = want or {v: 2 for v in targets}
        for v in targets:
            others = set(targets) - {v}
            while self.pebbles[v] < want[v]:
                if not self._find_pebble(v, others | {v}):
                    break
        return sum(self.pebbles[v] for v in targets)

    def independent(self, u: int, v: int) -> bool:
        """Would ``uv`` be accepted?  Pebbles may move; the matroid is unchanged."""
        if u == v:
            raise ValueError("loops are not edges")
        return self.gather((u, v)) == 4

    def insert(self, u: int, v: int) -> bool:
        if self.independent(u, v):
            self.pebbles[u] -= 1
            self.out[u].add(v)
            self.accepted.append(_norm(u, v))
            return True
        self.rejected.append(_norm(u, v))
        return False


def pebble_insert(state: PebbleState, u: int, v: int) -> bool:
    return state.insert(u, v)


def run_pebble_game(graph) -> PebbleState:
    vertices, edges = _edges_of(graph)
    state = PebbleState(vertices)
    for u, v in edges:
        state.insert(u, v)
    return state


@dataclass(frozen=True)
class RigidityVerdict:
    rigid: bool
    laman_edges: tuple[Edge, ...]
    redundant_edges: tuple[Edge, ...]
    dof: int = field(default=0)

    def to_json(self) -> dict:
        return {
            "rigid": self.rigid,
            "laman_edges": [list(e) for e in self.laman_edges],
            "redundant_edges": [list(e) for e in self.redundant_edges],
            "dof": self.dof,
        }


def is_generically_rigid(graph) -> RigidityVerdict:
    vertices, _ = _edges_of(graph)
    n = len(vertices)
    if n < 2:
        raise ValueError("rigidity needs at least two vertices")
    state = run_pebble_game(graph)
    rigid = len(state.accepted) == 2 * n - 3
    return RigidityVerdict(
        rigid=rigid,
        laman_edges=tuple(state.accepted),
        redundant_edges=tuple(state.rejected),
        dof=2 * n - 3 - len(state.accepted),
    )


def laman_subgraph(graph) -> list[Edge]:
    """Maximal independent edge set, greedy in input edge order."""
    return list(run_pebble_game(graph).accepted)


def restores_rigidity(graph, a: int, b: int, state: PebbleState | None = None) -> bool:
    """Is ``graph + ab`` generically rigid?  ``state`` may be a saturated
    pebble state of ``graph`` to reuse."""
    vertices, _ = _edges_of(graph)
    n = len(vertices)
    state = (state or run_pebble_game(graph)).copy()
    if len(state.accepted) == 2 * n - 3:
        return True
    if len(state.accepted) < 2 * n - 4:
        return False
    return state.insert(a, b)


def in_closure(state: PebbleState, a: int, b: int) -> bool:
    """Is the distance between ``a`` and ``b`` fixed by the accepted edges?"""
    if a == b:
        return True
    return not state.copy().independent(a, b)


def rigid_components(graph) -> list[frozenset[int]]:
    """Maximal vertex sets that move rigidly; every edge lies in exactly one."""
    vertices, edges = _edges_of(graph)
    state = run_pebble_game(graph)
    comps: list[frozenset[int]] = []
    covered: set[Edge] = set()
    for u, v in sorted(_norm(*e) for e in edges):
        if (u, v) in covered:
            continue
        comp = {u, v}
        for w in vertices:
            if w not in comp and in_closure(state, u, w) and in_closure(state, v, w):
                comp.add(w)
        comp = frozenset(comp)
        comps.append(comp)
        for x, y in edges:
            if x in comp and y in comp:
                covered.add(_norm(x, y))
    return comps


def moves_rigidly_together(graph, s: Iterable[int]) -> bool:
    s = sorted(set(s))
    if len(s) < 2:
        raise ValueError("need at least two vertices")
    state = run_pebble_game(graph)
    return all(in_closure(state, a, b) for i, a in enumerate(s) for b in s[i + 1 :])
