"""Combinatorial plane embeddings.

A :class:`PlaneGraph` is a connected simple graph given by a rotation system
(the counterclockwise cyclic order of neighbours around every vertex) and a
dart ``(u, v)`` naming the outer face.  Faces are traced with

    next(u -> v) = v -> w,   w the ccw-predecessor of u at v,

so every face keeps its interior on the left of its darts.  An angle at ``v``
is keyed by the pair ``(v, w)``: the sweep at ``v`` going counterclockwise from
the neighbour ``w`` to the next neighbour.  It lies in the face containing the
dart ``v -> w``.  These keys survive local edits elsewhere in the graph, which
the labelling engine relies on.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence


class EmbeddingError(ValueError):
    """Raised for rotation systems that do not describe a plane graph."""

    def __init__(self, problems: Sequence[str] | str):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class Dart(NamedTuple):
    tail: int
    head: int


AngleKey = tuple[int, int]


@dataclass(frozen=True)
class Angle:
    vertex: int
    in_dart: Dart
    out_dart: Dart
    face: int
    index: int

    @property
    def key(self) -> AngleKey:
        return (self.vertex, self.out_dart.head)


def _canonical_rotation(rot: Sequence[int]) -> tuple[int, ...]:
    if not rot:
        return ()
    i = rot.index(min(rot))
    return tuple(rot[i:]) + tuple(rot[:i])


def _find(parent: dict, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def rotation_problems(rotations: Mapping[int, Sequence[int]]) -> list[str]:
    """Line-item diagnostics for the purely local rotation-system invariants."""
    problems = []
    verts = set(rotations)
    for v, rot in rotations.items():
        if len(set(rot)) != len(rot):
            problems.append(f"vertex {v}: repeated neighbour in rotation {list(rot)} (parallel edge)")
        for u in rot:
            if u == v:
                problems.append(f"vertex {v}: self-loop")
            elif u not in verts:
                problems.append(f"vertex {v}: unknown neighbour {u}")
            elif rot.count(u) == 1 and list(rotations[u]).count(v) != 1:
                problems.append(f"edge {{{v},{u}}} listed at {v} but not exactly once at {u}")
    return problems


class PlaneGraph:
    """Immutable combinatorial plane graph."""

    def __init__(
        self,
        rotations: Mapping[int, Sequence[int]],
        outer: Sequence[int],
        *,
        validate: bool = True,
    ):
        self._rot: dict[int, tuple[int, ...]] = {
            int(v): _canonical_rotation([int(u) for u in rot]) for v, rot in sorted(rotations.items())
        }
        self.outer_dart = Dart(int(outer[0]), int(outer[1]))
        if validate:
            problems = self.problems()
            if problems:
                raise EmbeddingError(problems)

    @classmethod
    def from_lists(cls, rotations: Sequence[Sequence[int]], outer: Sequence[int], **kw) -> "PlaneGraph":
        return cls(dict(enumerate(rotations)), outer, **kw)

    # ------------------------------------------------------------------ basic
    @property
    def rotations(self) -> Mapping[int, tuple[int, ...]]:
        return self._rot

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self._rot))

    @property
    def n(self) -> int:
        return len(self._rot)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted({(min(u, v), max(u, v)) for u, rot in self._rot.items() for v in rot}))

    @property
    def e(self) -> int:
        return len(self.edges)

    @cached_property
    def _edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._edge_set

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._rot[v]

    def degree(self, v: int) -> int:
        return len(self._rot[v])

    @cached_property
    def _pos(self) -> dict[int, dict[int, int]]:
        return {v: {u: i for i, u in enumerate(rot)} for v, rot in self._rot.items()}

    def succ(self, v: int, u: int) -> int:
        """Neighbour following ``u`` counterclockwise around ``v``."""
        rot = self._rot[v]
        return rot[(self._pos[v][u] + 1) % len(rot)]

    def pred(self, v: int, u: int) -> int:
        """Neighbour preceding ``u`` counterclockwise around ``v``."""
        rot = self._rot[v]
        return rot[(self._pos[v][u] - 1) % len(rot)]

    def next_dart(self, d: tuple[int, int]) -> Dart:
        u, v = d
        return Dart(v, self.pred(v, u))

    def darts(self) -> list[Dart]:
        return [Dart(u, v) for u in self.vertices for v in self._rot[u]]

    # ------------------------------------------------------------------ faces
    @cached_property
    def faces(self) -> tuple[tuple[Dart, ...], ...]:
        """Face traces, ordered by their smallest dart, each starting there."""
        seen: set[Dart] = set()
        faces = []
        for d in sorted(self.darts()):
            if d in seen:
                continue
            trace = []
            cur = d
            while cur not in seen:
                seen.add(cur)
                trace.append(cur)
                cur = self.next_dart(cur)
            if cur != d:
                raise EmbeddingError(f"face trace from {tuple(d)} does not close")
            faces.append(tuple(trace))
        return tuple(faces)

    @cached_property
    def face_of_dart(self) -> dict[Dart, int]:
        return {d: fid for fid, trace in enumerate(self.faces) for d in trace}

    @cached_property
    def outer_face(self) -> int:
        return self.face_of_dart[self.outer_dart]

    def bounded_faces(self) -> list[int]:
        return [f for f in range(len(self.faces)) if f != self.outer_face]

    def face_vertices(self, fid: int) -> list[int]:
        return [d.tail for d in self.faces[fid]]

    def face_of_angle(self, key: AngleKey) -> int:
        return self.face_of_dart[Dart(*key)]

    @cached_property
    def angles(self) -> tuple[Angle, ...]:
        out = []
        for fid, trace in enumerate(self.faces):
            k = len(trace)
            for i, d in enumerate(trace):
                out.append(Angle(d.tail, trace[(i - 1) % k], d, fid, i))
        return tuple(out)

    def angle_keys_at(self, v: int) -> list[AngleKey]:
        return [(v, w) for w in self._rot[v]]

    # ------------------------------------------------------------- validation
    def problems(self) -> list[str]:
        problems = rotation_problems(self._rot)
        if problems:
            return problems
        if self.n < 2 or not self.edges:
            return ["graph needs at least one edge"]
        if not is_connected(self.vertices, self.edges):
            problems.append("graph is not connected")
        if not self.has_edge(*self.outer_dart) or self.outer_dart.tail not in self._rot:
            problems.append(f"outer dart {tuple(self.outer_dart)} is not a dart of the graph")
        if problems:
            return problems
        try:
            f = len(self.faces)
        except EmbeddingError as exc:
            return exc.problems
        chi = self.n - self.e + f
        if chi != 2:
            problems.append(f"Euler characteristic V-E+F = {self.n}-{self.e}+{f} = {chi}, expected 2 (not planar)")
        return problems

    # ---------------------------------------------------------- serialization
    def to_json(self) -> dict:
        if self.vertices != tuple(range(self.n)):
            raise ValueError("only graphs on vertices 0..n-1 serialize")
        return {
            "n": self.n,
            "rotations": [list(self._rot[v]) for v in range(self.n)],
            "outer": list(self.outer_dart),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PlaneGraph":
        problems = []
        for key in ("n", "rotations", "outer"):
            if key not in data:
                problems.append(f"missing key {key!r}")
        if problems:
            raise EmbeddingError(problems)
        n, rots, outer = data["n"], data["rotations"], data["outer"]
        if not isinstance(n, int) or n < 2:
            raise EmbeddingError(f"'n' must be an integer >= 2, got {n!r}")
        if not isinstance(rots, list) or len(rots) != n:
            raise EmbeddingError(f"'rotations' must be a list of {n} lists")
        for v, rot in enumerate(rots):
            if not isinstance(rot, list) or not all(isinstance(u, int) for u in rot):
                problems.append(f"vertex {v}: rotation must be a list of integers")
        if not (isinstance(outer, list) and len(outer) == 2 and all(isinstance(u, int) for u in outer)):
            problems.append("'outer' must be a pair of vertex ids")
        if problems:
            raise EmbeddingError(problems)
        return cls.from_lists(rots, outer)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlaneGraph):
            return NotImplemented
        return self._rot == other._rot and self.outer_face_darts() == other.outer_face_darts()

    def __hash__(self) -> int:
        return hash((tuple(self._rot.items()), self.outer_face_darts()))

    def outer_face_darts(self) -> frozenset[Dart]:
        return frozenset(self.faces[self.outer_face])

    def __repr__(self) -> str:
        return f"PlaneGraph(n={self.n}, e={self.e}, outer={tuple(self.outer_dart)})"


def is_connected(vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> bool:
    vertices = list(vertices)
    if not vertices:
        return True
    adj: dict[int, list[int]] = {v: [] for v in vertices}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {vertices[0]}
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(vertices)


def components(vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    vertices = sorted(vertices)
    parent = {v: v for v in vertices}
    for u, v in edges:
        ru, rv = _find(parent, u), _find(parent, v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, list[int]] = {}
    for v in vertices:
        groups.setdefault(_find(parent, v), []).append(v)
    return sorted(groups.values())


# ------------------------------------------------------------------ operations
def trace_faces(g: PlaneGraph) -> list[list[Dart]]:
    return [list(f) for f in g.faces]


def angles_of(g: PlaneGraph) -> list[Angle]:
    return list(g.angles)


def faces_nondegenerate(g: PlaneGraph) -> bool:
    """True iff no face boundary walks along the same edge twice."""
    for trace in g.faces:
        edges = [(min(d), max(d)) for d in trace]
        if len(set(edges)) != len(edges):
            return False
    return True


def degenerate_faces(g: PlaneGraph) -> list[int]:
    bad = []
    for fid, trace in enumerate(g.faces):
        edges = [(min(d), max(d)) for d in trace]
        if len(set(edges)) != len(edges):
            bad.append(fid)
    return bad


def _surviving_outer(g: PlaneGraph, gone: set[int]) -> Dart:
    if not (set(g.outer_dart) & gone):
        return g.outer_dart
    for d in g.faces[g.outer_face]:
        if not (set(d) & gone):
            return d
    raise EmbeddingError("outer face has no dart avoiding the removed vertices")


def remove_vertex(g: PlaneGraph, v: int) -> PlaneGraph:
    rot = {u: [w for w in r if w != v] for u, r in g.rotations.items() if u != v}
    return PlaneGraph(rot, _surviving_outer(g, {v}))


def remove_edge(g: PlaneGraph, a: int, b: int) -> PlaneGraph:
    if not g.has_edge(a, b):
        raise EmbeddingError(f"{{{a},{b}}} is not an edge")
    rot = {u: [w for w in r if not {u, w} == {a, b}] for u, r in g.rotations.items()}
    outer = g.outer_dart
    if set(outer) == {a, b}:
        outer = next(d for d in g.faces[g.outer_face] if set(d) != {a, b})
    return PlaneGraph(rot, outer)


def insert_edge(g: PlaneGraph, a: int, b: int, pos_a: int, pos_b: int) -> PlaneGraph:
    """Insert edge ``ab`` at rotation index ``pos_a`` of ``a`` and ``pos_b`` of ``b``.

    Index semantics follow ``list.insert``.  Both new darts must open into the
    same face, otherwise the result would not be plane.
    """
    if a == b or g.has_edge(a, b):
        raise EmbeddingError(f"inserting {{{a},{b}}} would break simplicity")
    ra, rb = list(g.rotations[a]), list(g.rotations[b])
    if not (0 <= pos_a <= len(ra) and 0 <= pos_b <= len(rb)):
        raise EmbeddingError("rotation slot out of range")
    fa = g.face_of_angle((a, ra[(pos_a - 1) % len(ra)]))
    fb = g.face_of_angle((b, rb[(pos_b - 1) % len(rb)]))
    if fa != fb:
        raise EmbeddingError(f"slots at {a} and {b} lie on different faces ({fa} vs {fb})")
    ra.insert(pos_a, b)
    rb.insert(pos_b, a)
    rot = dict(g.rotations)
    rot[a], rot[b] = ra, rb
    return PlaneGraph(rot, g.outer_dart)


def insert_edge_in_face(g: PlaneGraph, fid: int, i: int, j: int) -> PlaneGraph:
    """Chord between the vertices at trace positions ``i`` and ``j`` of face ``fid``."""
    trace = g.faces[fid]
    a, b = trace[i].tail, trace[j].tail
    # the angle at a in this face runs ccw from trace[i].head; the chord goes right after it
    pos_a = g._pos[a][trace[i].head] + 1
    pos_b = g._pos[b][trace[j].head] + 1
    return insert_edge(g, a, b, pos_a, pos_b)


def insert_vertex(g: PlaneGraph, v: int, fid: int, positions: Sequence[int]) -> PlaneGraph:
    """Add vertex ``v`` inside face ``fid``, joined to the trace positions given."""
    if v in g.rotations:
        raise EmbeddingError(f"vertex {v} already present")
    trace = g.faces[fid]
    positions = sorted(set(positions))
    targets = [trace[i].tail for i in positions]
    if len(set(targets)) != len(targets):
        raise EmbeddingError("a vertex cannot be joined twice to the same neighbour")
    rot = {u: list(r) for u, r in g.rotations.items()}
    for i in positions:
        d = trace[i]
        r = rot[d.tail]
        r.insert(r.index(d.head) + 1, v)
    rot[v] = targets
    return PlaneGraph(rot, g.outer_dart)


def replace_path(g: PlaneGraph, v: int, a: int, b: int) -> PlaneGraph:
    """``G \\ v`` plus the edge ``ab`` routed along the old path ``a - v - b``."""
    if not (g.has_edge(v, a) and g.has_edge(v, b)) or a == b:
        raise EmbeddingError(f"{a} and {b} must be distinct neighbours of {v}")
    if g.has_edge(a, b):
        raise EmbeddingError(f"{{{a},{b}}} already present")
    rot = {}
    for u, r in g.rotations.items():
        if u == v:
            continue
        if u == a:
            rot[u] = [b if w == v else w for w in r]
        elif u == b:
            rot[u] = [a if w == v else w for w in r]
        else:
            rot[u] = [w for w in r if w != v]
    return PlaneGraph(rot, _surviving_outer(g, {v}))


def restrict(g: PlaneGraph, edges: Iterable[tuple[int, int]]) -> dict[int, tuple[int, ...]]:
    """Rotation system of the subgraph spanned by ``edges`` (not validated)."""
    es = {(min(u, v), max(u, v)) for u, v in edges}
    rot: dict[int, tuple[int, ...]] = {}
    for u, v in es:
        rot.setdefault(u, ())
        rot.setdefault(v, ())
    for u in rot:
        rot[u] = tuple(w for w in g.rotations[u] if (min(u, w), max(u, w)) in es)
    return rot


# ------------------------------------------------------------- subcomplexes
def outer_region(g: PlaneGraph, edges: Iterable[tuple[int, int]]) -> frozenset[int]:
    """Faces of ``g`` lying in the region of the subgraph ``edges`` that contains
    the outer face of ``g``."""
    es = {(min(u, v), max(u, v)) for u, v in edges}
    nf = len(g.faces)
    parent = {f: f for f in range(nf)}
    fod = g.face_of_dart
    for u, v in g.edges:
        if (u, v) in es:
            continue
        a, b = _find(parent, fod[(u, v)]), _find(parent, fod[(v, u)])
        if a != b:
            parent[a] = b
    root = _find(parent, g.outer_face)
    return frozenset(f for f in range(nf) if _find(parent, f) == root)


def _trace_subgraph(rot: Mapping[int, tuple[int, ...]], start: tuple[int, int]) -> tuple[Dart, ...]:
    trace = []
    cur = Dart(*start)
    while True:
        trace.append(cur)
        u, v = cur
        r = rot[v]
        cur = Dart(v, r[(r.index(u) - 1) % len(r)])
        if cur == trace[0]:
            return tuple(trace)


@dataclass(frozen=True)
class SubComplex:
    parent: PlaneGraph
    vertices: frozenset[int]
    edges: frozenset[tuple[int, int]]
    boundary_cycle: tuple[Dart, ...]
    outer_faces: frozenset[int]

    @property
    def b(self) -> int:
        return len(self.boundary_cycle)

    @property
    def e(self) -> int:
        return len(self.edges)

    def is_simply_connected(self) -> bool:
        """Connected, and every bounded face of the subgraph is a face of the parent."""
        g = self.parent
        if not is_connected(self.vertices, self.edges):
            return False
        for u, v in g.edges:
            if (u, v) not in self.edges:
                if g.face_of_dart[(u, v)] not in self.outer_faces:
                    return False
        return all(
            all(g.face_of_dart[(v, w)] in self.outer_faces for w in g.neighbors(v))
            for v in g.vertices
            if v not in self.vertices
        )

    @classmethod
    def from_edges(cls, g: PlaneGraph, edges: Iterable[tuple[int, int]]) -> "SubComplex":
        es = frozenset((min(u, v), max(u, v)) for u, v in edges)
        if not es:
            raise ValueError("subcomplex needs at least one edge")
        verts = frozenset(x for e in es for x in e)
        outer = outer_region(g, es)
        rot = restrict(g, es)
        start = next(
            Dart(*d) for p, q in sorted(es) for d in ((p, q), (q, p)) if g.face_of_dart[d] in outer
        )
        return cls(g, verts, es, _trace_subgraph(rot, start), outer)

    @classmethod
    def single_vertex(cls, g: PlaneGraph, v: int) -> "SubComplex":
        return cls(g, frozenset([v]), frozenset(), (), frozenset(range(len(g.faces))))


def induced_subcomplex(g: PlaneGraph, s: Iterable[int]) -> list[SubComplex]:
    """One subcomplex per component of ``g[s]``, closed under everything inside
    its boundary cycle."""
    s = set(s)
    if not s:
        raise ValueError("vertex subset must be nonempty")
    induced = [(u, v) for u, v in g.edges if u in s and v in s]
    result = []
    for comp in components(s, induced):
        cs = set(comp)
        es = [(u, v) for u, v in induced if u in cs]
        if not es:
            result.append(SubComplex.single_vertex(g, comp[0]))
            continue
        outer = outer_region(g, es)
        closed = set(es)
        for u, v in g.edges:
            if (u, v) not in closed and g.face_of_dart[(u, v)] not in outer:
                closed.add((u, v))
        result.append(SubComplex.from_edges(g, closed))
    return result


def from_drawing(coords: Mapping[int, Sequence[float]] | Sequence[Sequence[float]], edges: Iterable[tuple[int, int]]) -> PlaneGraph:
    """Plane graph of a straight-line drawing: rotations by polar angle, outer
    face through the lowest vertex."""
    import math

    pts = dict(coords) if isinstance(coords, Mapping) else dict(enumerate(coords))
    rot: dict[int, list[int]] = {v: [] for v in pts}
    for u, v in edges:
        rot[u].append(v)
        rot[v].append(u)

    def theta(v, w):
        return math.atan2(pts[w][1] - pts[v][1], pts[w][0] - pts[v][0])

    for v in rot:
        rot[v].sort(key=lambda w: theta(v, w))
    low = min(pts, key=lambda v: (pts[v][1], pts[v][0]))
    r = rot[low]
    down = -math.pi / 2
    outer = None
    for i, w in enumerate(r):
        a, b = theta(low, w), theta(low, r[(i + 1) % len(r)])
        sweep = (b - a) % (2 * math.pi) or 2 * math.pi
        if (down - a) % (2 * math.pi) < sweep:
            outer = (low, w)
            break
    return PlaneGraph({v: rot[v] for v in sorted(rot)}, outer)
