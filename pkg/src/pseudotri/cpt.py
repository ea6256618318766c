"""Combinatorial pseudo-triangulation labellings.

A labelling assigns BIG or SMALL to every angle of a plane graph.  It is a
CPT when every bounded face has exactly three SMALL angles, every angle of
the outer face is BIG, and no vertex carries two BIG angles.  A vertex with
a BIG angle is *pointed*.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .plane_graph import AngleKey, PlaneGraph, SubComplex, _find, components, outer_region

GL_CAP = 18


class Label(str, enum.Enum):
    BIG = "big"
    SMALL = "small"

    def flipped(self) -> "Label":
        return Label.SMALL if self is Label.BIG else Label.BIG


BIG, SMALL = Label.BIG, Label.SMALL


class LabellingInputError(ValueError):
    """The labelling does not cover the angles of its graph."""


class InvalidCpt(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


class CptLabelling:
    """Angle labels over a :class:`PlaneGraph`, keyed by ``(vertex, out-neighbour)``."""

    def __init__(self, graph: PlaneGraph, label: Mapping[AngleKey, Label | str]):
        self.graph = graph
        self.label: dict[AngleKey, Label] = {tuple(k): Label(v) for k, v in label.items()}

    def __getitem__(self, key: AngleKey) -> Label:
        return self.label[key]

    def missing(self) -> list[AngleKey]:
        return [a.key for a in self.graph.angles if a.key not in self.label]

    def big_angles(self, v: int) -> list[AngleKey]:
        return [k for k in self.graph.angle_keys_at(v) if self.label.get(k) is BIG]

    def is_pointed(self, v: int) -> bool:
        return bool(self.big_angles(v))

    @property
    def pointed(self) -> frozenset[int]:
        return frozenset(v for v in self.graph.vertices if self.is_pointed(v))

    @property
    def non_pointed(self) -> frozenset[int]:
        return frozenset(self.graph.vertices) - self.pointed

    def face_labels(self, fid: int) -> list[Label]:
        return [self.label[(d.tail, d.head)] for d in self.graph.faces[fid]]

    def with_labels(self, changes: Mapping[AngleKey, Label]) -> "CptLabelling":
        lab = dict(self.label)
        lab.update(changes)
        return CptLabelling(self.graph, lab)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CptLabelling):
            return NotImplemented
        return self.graph == other.graph and self.label == other.label

    def __repr__(self) -> str:
        return f"CptLabelling({self.graph!r}, x={len(self.non_pointed)}, y={len(self.pointed)})"

    # ---------------------------------------------------------- serialization
    def to_json(self) -> dict:
        g = self.graph
        return {
            "angles": [
                {"face": a.face, "index": a.index, "label": self.label[a.key].value}
                for a in g.angles
            ]
        }

    @classmethod
    def from_json(cls, graph: PlaneGraph, data: Mapping) -> "CptLabelling":
        if "angles" not in data or not isinstance(data["angles"], list):
            raise LabellingInputError("labelling file needs an 'angles' list")
        label: dict[AngleKey, Label] = {}
        faces = graph.faces
        for item in data["angles"]:
            try:
                f, i, lab = item["face"], item["index"], Label(item["label"])
                d = faces[f][i]
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                raise LabellingInputError(f"bad angle entry {item!r}: {exc}") from None
            label[(d.tail, d.head)] = lab
        out = cls(graph, label)
        missing = out.missing()
        if missing:
            raise LabellingInputError(f"{len(missing)} angles unlabelled, e.g. at vertex {missing[0][0]}")
        return out


@dataclass(frozen=True)
class CountSummary:
    e: int
    x: int
    y: int
    f: int
    b: int | None = None
    c1: int | None = None
    c2: int | None = None

    @property
    def laman_bound(self) -> int:
        return 3 * self.x + 2 * self.y - 3

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def cpt_violations(l: CptLabelling) -> list[str]:
    g = l.graph
    missing = l.missing()
    if missing:
        raise LabellingInputError(f"{len(missing)} angles unlabelled, e.g. {missing[0]}")
    problems = []
    for fid in range(len(g.faces)):
        labels = l.face_labels(fid)
        if fid == g.outer_face:
            n_small = labels.count(SMALL)
            if n_small:
                problems.append(f"outer face {fid}: {n_small} SMALL angle(s), all must be BIG")
        else:
            n_small = labels.count(SMALL)
            if n_small != 3:
                problems.append(f"face {fid} {g.face_vertices(fid)}: {n_small} SMALL angles, expected 3")
    for v in g.vertices:
        nb = len(l.big_angles(v))
        if nb > 1:
            problems.append(f"vertex {v}: {nb} BIG angles")
    return problems


def count_summary(l: CptLabelling) -> CountSummary:
    g = l.graph
    return CountSummary(e=g.e, x=len(l.non_pointed), y=len(l.pointed), f=len(g.faces) - 1)


def validate_cpt(l: CptLabelling) -> CountSummary:
    """Check the CPT conditions and the edge count ``e = 3x + 2y - 3``."""
    problems = cpt_violations(l)
    if problems:
        raise InvalidCpt(problems)
    s = count_summary(l)
    if s.e != s.laman_bound:
        raise InvalidCpt([f"edge count {s.e} != 3x+2y-3 = {s.laman_bound}"])
    return s


def is_cpt(l: CptLabelling) -> bool:
    try:
        validate_cpt(l)
    except InvalidCpt:
        return False
    return True


# ------------------------------------------------------------------ corners
class CornerType(str, enum.Enum):
    TYPE1 = "type1"
    TYPE2 = "type2"


@dataclass(frozen=True)
class Corner:
    vertex: int
    kind: CornerType


@dataclass(frozen=True)
class CornerReport:
    corners: tuple[Corner, ...]

    @property
    def c1(self) -> int:
        return sum(c.kind is CornerType.TYPE1 for c in self.corners)

    @property
    def c2(self) -> int:
        return sum(c.kind is CornerType.TYPE2 for c in self.corners)

    def __len__(self) -> int:
        return len(self.corners)


def _classify(l: CptLabelling, vertices: Iterable[int], edges: set, outer: frozenset[int]) -> list[Corner]:
    g = l.graph
    found = []
    for v in sorted(vertices):
        big = l.big_angles(v)
        if big:
            if g.face_of_angle(big[0]) in outer:
                found.append(Corner(v, CornerType.TYPE1))
            continue
        rot = g.neighbors(v)
        in_h = [(min(v, w), max(v, w)) in edges for w in rot]
        if not any(in_h):
            runs = [list(range(len(rot)))]
        else:
            runs = []
            k = len(rot)
            for i in range(k):
                if not in_h[i]:
                    continue
                run = [i]
                j = (i + 1) % k
                while not in_h[j]:
                    run.append(j)
                    j = (j + 1) % k
                runs.append(run)
        for run in runs:
            if len(run) >= 2 and g.face_of_angle((v, rot[run[0]])) in outer:
                found.append(Corner(v, CornerType.TYPE2))
                break
    return found


def corners(h: SubComplex, l: CptLabelling) -> CornerReport:
    """Classify the corners of a subcomplex with respect to the labelling."""
    return CornerReport(tuple(_classify(l, h.vertices, set(h.edges), h.outer_faces)))


def predicted_c1(h: SubComplex, l: CptLabelling) -> int:
    """Type-1 corner count predicted from the counts of ``h``."""
    pointed = l.pointed
    y = sum(v in pointed for v in h.vertices)
    x = len(h.vertices) - y
    return h.e - 3 * x - 2 * y + 3 + h.b


# ------------------------------------------------------- generalized Laman
@dataclass(frozen=True)
class LamanCheck:
    ok: bool
    witness: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


def _vertex_weights(l: CptLabelling) -> dict[int, int]:
    pointed = l.pointed
    return {v: 2 if v in pointed else 3 for v in l.graph.vertices}


def _enumerate_counts(verts: list[int], edges, weights: dict[int, int]):
    n = len(verts)
    idx = {v: i for i, v in enumerate(verts)}
    masks = np.arange(1 << n, dtype=np.int64)
    e_in = np.zeros(1 << n, dtype=np.int64)
    for u, v in edges:
        bit = (1 << idx[u]) | (1 << idx[v])
        e_in += (masks & bit) == bit
    size = np.zeros(1 << n, dtype=np.int64)
    cap = np.zeros(1 << n, dtype=np.int64)
    for v in verts:
        on = (masks >> idx[v]) & 1
        size += on
        cap += on * weights[v]
    return masks, e_in, size, cap


def _first_witness(verts: list[int], masks: np.ndarray) -> tuple[int, ...] | None:
    if masks.size == 0:
        return None
    subsets = [tuple(v for i, v in enumerate(verts) if (int(m) >> i) & 1) for m in masks]
    return min(subsets, key=lambda s: (len(s), s))


def generalized_laman(l: CptLabelling, *, method: str = "enumerate", cap: int = GL_CAP) -> LamanCheck:
    """Every set of ``x`` non-pointed plus ``y`` pointed vertices (``x+y >= 2``)
    spans at most ``3x + 2y - 3`` edges.

    ``method="pebble"`` runs a capacity-3/capacity-2 pebble game instead of
    enumerating subsets; it reports no witness.
    """
    g = l.graph
    weights = _vertex_weights(l)
    if method == "pebble":
        return LamanCheck(_pebble_sparse(g.vertices, g.edges, weights))
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")
    verts = list(g.vertices)
    if len(verts) > cap:
        raise ValueError(f"subset enumeration refused: n={len(verts)} exceeds cap {cap}")
    masks, e_in, size, weight = _enumerate_counts(verts, g.edges, weights)
    bad = masks[(size >= 2) & (e_in > weight - 3)]
    if bad.size == 0:
        return LamanCheck(True)
    sizes = np.array([bin(int(m)).count("1") for m in bad])
    return LamanCheck(False, _first_witness(verts, bad[sizes == sizes.min()]))


def _pebble_sparse(vertices, edges, weights: dict[int, int]) -> bool:
    """Variable-capacity (k_v, 3) pebble game; true iff every edge is accepted."""
    from .rigidity import PebbleState

    state = PebbleState(vertices)
    state.pebbles = dict(weights)
    for u, v in edges:
        if not _gather_four(state, u, v):
            return False
        payer = u if state.pebbles[u] > 0 else v
        other = v if payer == u else u
        state.pebbles[payer] -= 1
        state.out[payer].add(other)
    return True


def _gather_four(state, u: int, v: int) -> bool:
    for w in (u, v):
        others = {u, v} - {w}
        while state._find_pebble(w, others | {w}):
            pass
    return state.pebbles[u] + state.pebbles[v] >= 4


def generalized_laman_dual(l: CptLabelling) -> LamanCheck:
    """Every set of ``x'`` non-pointed plus ``y'`` pointed vertices of size at
    most ``n - 2`` is incident to at least ``3x' + 2y'`` edges."""
    g = l.graph
    weights = _vertex_weights(l)
    verts = list(g.vertices)
    n = len(verts)
    for k in range(1, n - 1):
        for sub in itertools.combinations(verts, k):
            s = set(sub)
            incident = sum(1 for u, v in g.edges if u in s or v in s)
            if incident < sum(weights[v] for v in sub):
                return LamanCheck(False, sub)
    return LamanCheck(True)


def connected_subsets(g: PlaneGraph, min_size: int = 1) -> Iterable[tuple[int, ...]]:
    verts = list(g.vertices)
    for k in range(min_size, len(verts) + 1):
        for sub in itertools.combinations(verts, k):
            s = set(sub)
            es = [(u, v) for u, v in g.edges if u in s and v in s]
            if len(components(sub, es)) == 1:
                yield sub


def three_corner_property(l: CptLabelling) -> LamanCheck:
    """Every connected induced subgraph on at least three vertices has at
    least three corners."""
    g = l.graph
    for sub in connected_subsets(g, 3):
        s = set(sub)
        es = {(u, v) for u, v in g.edges if u in s and v in s}
        outer = outer_region(g, es)
        if len(_classify(l, sub, es, outer)) < 3:
            return LamanCheck(False, sub)
    return LamanCheck(True)


def face_corners(l: CptLabelling, fid: int) -> list[int]:
    """Trace positions of the SMALL angles of a face."""
    return [i for i, lab in enumerate(l.face_labels(fid)) if lab is SMALL]
