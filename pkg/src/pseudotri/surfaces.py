"""CPT labellings of graphs embedded on closed surfaces.

An embedding is a rotation system plus a sign per edge; a negative edge
reverses the local orientation when crossed.  Faces are traced with the
usual signed face-walking rule, so they come without a distinguished outer
face, and the counting identity depends on the surface:
``e = 3x + 2y - 6 + 6g`` when orientable, ``e = 3x + 2y - 6 + 3g`` otherwise
(``g`` is the genus, counted in crosscaps for non-orientable surfaces).
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .cpt import BIG, SMALL, Label, LabellingInputError
from .plane_graph import EmbeddingError, is_connected, rotation_problems

AngleKey = tuple[int, int]


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class SurfaceGraph:
    def __init__(self, rotations: Mapping[int, Sequence[int]], edge_signs: Mapping[tuple[int, int], int] | None = None):
        self.rotations: dict[int, tuple[int, ...]] = {int(v): tuple(r) for v, r in rotations.items()}
        problems = rotation_problems(self.rotations)
        if problems:
            raise EmbeddingError(problems)
        self.edges = tuple(sorted({_norm(u, w) for u, r in self.rotations.items() for w in r}))
        if not self.edges:
            raise EmbeddingError("surface graph needs at least one edge")
        if not is_connected(self.rotations, self.edges):
            raise EmbeddingError("surface graph must be connected")
        signs = {_norm(*e): int(s) for e, s in (edge_signs or {}).items()}
        for e, s in signs.items():
            if e not in self.edges:
                raise EmbeddingError(f"sign given for non-edge {e}")
            if s not in (1, -1):
                raise EmbeddingError(f"edge sign must be +1 or -1, got {s}")
        self.signs = {e: signs.get(e, 1) for e in self.edges}
        self._pos = {v: {w: i for i, w in enumerate(r)} for v, r in self.rotations.items()}
        self.faces = self._trace()

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self.rotations))

    @property
    def n(self) -> int:
        return len(self.rotations)

    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def f(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.n - self.e + self.f

    def sign(self, u: int, v: int) -> int:
        return self.signs[_norm(u, v)]

    def succ(self, v: int, u: int) -> int:
        r = self.rotations[v]
        return r[(self._pos[v][u] + 1) % len(r)]

    def pred(self, v: int, u: int) -> int:
        r = self.rotations[v]
        return r[(self._pos[v][u] - 1) % len(r)]

    def angle_keys(self) -> list[AngleKey]:
        return [(v, w) for v in self.vertices for w in self.rotations[v]]

    def _trace(self) -> list[tuple[AngleKey, ...]]:
        """Faces as sequences of angle keys; mirror walks are merged."""
        seen: set[tuple[int, int, int]] = set()
        faces: list[tuple[AngleKey, ...]] = []
        keysets: set[frozenset] = set()
        for u in self.vertices:
            for v in self.rotations[u]:
                for s in (1, -1):
                    if (u, v, s) in seen:
                        continue
                    walk = []
                    state = (u, v, s)
                    while state not in seen:
                        seen.add(state)
                        a, b, sg = state
                        sg2 = sg * self.sign(a, b)
                        if sg2 == 1:
                            c = self.pred(b, a)
                            walk.append((b, c))
                        else:
                            c = self.succ(b, a)
                            walk.append((b, a))
                        state = (b, c, sg2)
                    ks = frozenset(walk)
                    if ks not in keysets:
                        keysets.add(ks)
                        faces.append(tuple(walk))
        return faces

    def face_of_angle(self) -> dict[AngleKey, int]:
        return {k: i for i, f in enumerate(self.faces) for k in f}

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "rotations": [list(self.rotations[v]) for v in self.vertices],
            "edge_signs": [[u, v, s] for (u, v), s in self.signs.items() if s != 1],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SurfaceGraph":
        if not isinstance(data, Mapping) or "rotations" not in data:
            raise ValueError("surface graph JSON needs 'rotations'")
        rot = data["rotations"]
        if isinstance(rot, list):
            rot = {i: r for i, r in enumerate(rot)}
        else:
            rot = {int(k): r for k, r in rot.items()}
        signs = {}
        for item in data.get("edge_signs", []) or []:
            if not (isinstance(item, list) and len(item) == 3):
                raise ValueError(f"edge sign entries are [u, v, sign], got {item!r}")
            signs[(int(item[0]), int(item[1]))] = int(item[2])
        return cls(rot, signs)


def is_orientable(sg: SurfaceGraph) -> bool:
    """Can vertices be flipped so that every edge becomes positive?"""
    side: dict[int, int] = {}
    for root in sg.vertices:
        if root in side:
            continue
        side[root] = 1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in sg.rotations[u]:
                want = side[u] * sg.sign(u, w)
                if w not in side:
                    side[w] = want
                    queue.append(w)
                elif side[w] != want:
                    return False
    return True


def genus_of(sg: SurfaceGraph) -> tuple[bool, int]:
    chi = sg.euler_characteristic
    orientable = is_orientable(sg)
    if orientable:
        if chi % 2:
            raise EmbeddingError(f"odd Euler characteristic {chi} on an orientable surface")
        return True, (2 - chi) // 2
    return False, 2 - chi


class SurfaceCptViolation(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


class SurfaceInconsistency(RuntimeError):
    """A valid surface CPT broke the counting identity: an embedding bug."""


@dataclass
class SurfaceCpt:
    graph: SurfaceGraph
    label: dict[AngleKey, Label]

    def __post_init__(self):
        self.label = {tuple(k): Label(v) for k, v in self.label.items()}

    @property
    def pointed(self) -> frozenset[int]:
        return frozenset(v for (v, _), lab in self.label.items() if lab is BIG)

    def to_json(self) -> dict:
        return {"angles": [{"vertex": v, "from": w, "label": lab.value} for (v, w), lab in sorted(self.label.items())]}

    @classmethod
    def from_json(cls, sg: SurfaceGraph, data: Mapping) -> "SurfaceCpt":
        items = data.get("angles") if isinstance(data, Mapping) else None
        if not isinstance(items, list):
            raise LabellingInputError("surface labelling JSON needs an 'angles' list")
        label = {}
        for it in items:
            try:
                label[(int(it["vertex"]), int(it["from"]))] = Label(it["label"])
            except (KeyError, TypeError, ValueError) as exc:
                raise LabellingInputError(f"bad angle entry {it!r}: {exc}") from None
        return cls(sg, label)


@dataclass(frozen=True)
class SurfaceSummary:
    orientable: bool
    g: int
    e: int
    x: int
    y: int
    f: int
    identity_rhs: int

    @property
    def identity_holds(self) -> bool:
        return self.e == self.identity_rhs

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["identity_holds"] = self.identity_holds
        return d


def surface_cpt_violations(sc: SurfaceCpt) -> list[str]:
    sg = sc.graph
    keys = sg.angle_keys()
    missing = [k for k in keys if k not in sc.label]
    if missing:
        raise LabellingInputError(f"{len(missing)} angles unlabelled, e.g. {missing[:3]}")
    extra = [k for k in sc.label if k not in set(keys)]
    if extra:
        raise LabellingInputError(f"labels for non-angles {extra[:3]}")
    out = []
    for fid, face in enumerate(sg.faces):
        smalls = sum(sc.label[k] is SMALL for k in face)
        if smalls != 3:
            out.append(f"face {fid} has {smalls} small angles")
    for v in sg.vertices:
        bigs = sum(sc.label[(v, w)] is BIG for w in sg.rotations[v])
        if bigs > 1:
            out.append(f"vertex {v} has {bigs} big angles")
    return out


def identity_rhs(orientable: bool, g: int, x: int, y: int) -> int:
    return 3 * x + 2 * y - 6 + (6 * g if orientable else 3 * g)


def check_surface_cpt(sc: SurfaceCpt) -> SurfaceSummary:
    problems = surface_cpt_violations(sc)
    if problems:
        raise SurfaceCptViolation(problems)
    sg = sc.graph
    orientable, g = genus_of(sg)
    y = len(sc.pointed)
    x = sg.n - y
    summary = SurfaceSummary(orientable, g, sg.e, x, y, sg.f, identity_rhs(orientable, g, x, y))
    if not summary.identity_holds:
        raise SurfaceInconsistency(f"valid surface CPT breaks the count identity: {json.dumps(summary.to_json())}")
    return summary


def pointed_feasible(sg: SurfaceGraph) -> bool:
    orientable, g = genus_of(sg)
    return sg.e == identity_rhs(orientable, g, 0, sg.n)


def search_surface_cpts(sg: SurfaceGraph, cap: int = 40) -> list[SurfaceCpt]:
    """All surface CPT labellings (exhaustive, ``2e <= cap``)."""
    if 2 * sg.e > cap:
        raise ValueError(f"surface labelling search refused: {2 * sg.e} angles exceed cap {cap}")
    face_of = sg.face_of_angle()
    need = {f: 3 for f in range(sg.f)}
    left = {f: len(face) for f, face in enumerate(sg.faces)}
    verts = sg.vertices
    out: list[SurfaceCpt] = []
    chosen: dict[int, AngleKey | None] = {}

    def rec(i: int):
        if i == len(verts):
            if all(v == 0 for v in need.values()):
                label = {}
                for u, big in chosen.items():
                    for w in sg.rotations[u]:
                        label[(u, w)] = BIG if (u, w) == big else SMALL
                out.append(SurfaceCpt(sg, label))
            return
        v = verts[i]
        keys = [(v, w) for w in sg.rotations[v]]
        for big in itertools.chain([None], keys):
            delta = []
            ok = True
            for k in keys:
                f = face_of[k]
                small = k != big
                need[f] -= small
                left[f] -= 1
                delta.append((f, small))
                if need[f] < 0 or need[f] > left[f]:
                    ok = False
            if ok:
                chosen[v] = big
                rec(i + 1)
                del chosen[v]
            for f, small in delta:
                need[f] += small
                left[f] += 1

    rec(0)
    return out


def from_plane(rotations: Mapping[int, Sequence[int]]) -> SurfaceGraph:
    """The sphere embedding of a plane rotation system."""
    return SurfaceGraph(rotations)
