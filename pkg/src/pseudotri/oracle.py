"""Slow, independent ground truth used to cross-check the fast paths."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .cpt import BIG, GL_CAP, SMALL, CptLabelling, cpt_violations
from .plane_graph import EmbeddingError, PlaneGraph, insert_edge_in_face, insert_vertex, remove_edge
from .rigidity import _edges_of, is_generically_rigid

ANGLE_CAP = 26


# ------------------------------------------------------------------ rank
def rigidity_matrix(edges: Sequence[tuple[int, int]], coords: dict[int, np.ndarray], index: dict[int, int]) -> np.ndarray:
    m = np.zeros((len(edges), 2 * len(index)))
    for r, (u, v) in enumerate(edges):
        d = coords[u] - coords[v]
        m[r, 2 * index[u] : 2 * index[u] + 2] = d
        m[r, 2 * index[v] : 2 * index[v] + 2] = -d
    return m


def elimination_rank(m: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Rank by Gaussian elimination with partial pivoting; pivots below
    ``rel_tol`` times the largest entry count as zero."""
    a = np.array(m, dtype=float)
    if a.size == 0:
        return 0
    tol = rel_tol * max(np.abs(a).max(), 1.0)
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        p = rank + int(np.argmax(np.abs(a[rank:, c])))
        if abs(a[p, c]) <= tol:
            continue
        a[[rank, p]] = a[[p, rank]]
        a[rank + 1 :] -= np.outer(a[rank + 1 :, c] / a[rank, c], a[rank])
        rank += 1
    return rank


@dataclass(frozen=True)
class RankVerdict:
    rigid: bool
    ranks: tuple[int, ...]
    target: int


def rank_rigidity_oracle(graph, trials: int = 3, seed: int = 0, rel_tol: float = 1e-8) -> RankVerdict:
    """Rigid iff some random placement reaches rank ``2n - 3``."""
    vertices, edges = _edges_of(graph)
    n = len(vertices)
    if n < 2:
        raise ValueError("rigidity needs at least two vertices")
    index = {v: i for i, v in enumerate(vertices)}
    rng = np.random.default_rng(seed)
    target = 2 * n - 3
    ranks = []
    for _ in range(trials):
        coords = {v: rng.uniform(-1.0, 1.0, 2) for v in vertices}
        ranks.append(elimination_rank(rigidity_matrix(edges, coords, index), rel_tol))
    return RankVerdict(any(r == target for r in ranks), tuple(ranks), target)


# ------------------------------------------------------ generalized Laman
@dataclass(frozen=True)
class SubsetVerdict:
    ok: bool
    violations: tuple[tuple[int, ...], ...]


def enumerate_gl_subsets(l: CptLabelling, cap: int = GL_CAP) -> SubsetVerdict:
    """All vertex sets of size >= 2 spanning more than ``3x + 2y - 3`` edges."""
    g = l.graph
    verts = list(g.vertices)
    if len(verts) > cap:
        raise ValueError(f"subset enumeration refused: n={len(verts)} exceeds cap {cap}")
    pointed = l.pointed
    bad = []
    for k in range(2, len(verts) + 1):
        for sub in itertools.combinations(verts, k):
            s = set(sub)
            e = sum(1 for u, v in g.edges if u in s and v in s)
            bound = sum(2 if v in pointed else 3 for v in sub) - 3
            if e > bound:
                bad.append(sub)
    return SubsetVerdict(not bad, tuple(bad))


# ------------------------------------------------------ labelling search
def search_all_cpt_labellings(g: PlaneGraph, cap: int = ANGLE_CAP) -> list[CptLabelling]:
    """Every CPT labelling of ``g`` (outer angles BIG, three SMALL per bounded
    face, at most one BIG per vertex)."""
    if 2 * g.e > cap:
        raise ValueError(f"labelling search refused: {2 * g.e} angles exceed cap {cap}")
    outer = g.outer_face
    keys_at = {v: g.angle_keys_at(v) for v in g.vertices}
    face = {k: g.face_of_angle(k) for ks in keys_at.values() for k in ks}
    options: list[tuple[int, list]] = []
    for v in g.vertices:
        forced = [k for k in keys_at[v] if face[k] == outer]
        if len(forced) > 1:
            return []
        options.append((v, forced if forced else [None] + keys_at[v]))
    # bounded-face bookkeeping: smalls so far, angles left undecided
    need = {f: 3 for f in g.bounded_faces()}
    left = {f: 0 for f in g.bounded_faces()}
    for k, f in face.items():
        if f != outer:
            left[f] += 1
    out: list[CptLabelling] = []
    chosen: dict[int, object] = {}

    def rec(i: int):
        if i == len(options):
            if all(need[f] == 0 for f in need):
                label = {}
                for v, big in chosen.items():
                    for k in keys_at[v]:
                        label[k] = BIG if k == big else SMALL
                out.append(CptLabelling(g, label))
            return
        v, opts = options[i]
        for big in opts:
            delta = []
            ok = True
            for k in keys_at[v]:
                f = face[k]
                if f == outer:
                    continue
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


# ------------------------------------------------------------------ corpus
@dataclass
class CorpusInstance:
    name: str
    graph: PlaneGraph
    labelling: CptLabelling | None = None
    coords: list[list[int]] | None = None
    tags: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        d = {"name": self.name, "graph": self.graph.to_json(), "tags": list(self.tags)}
        if self.labelling is not None:
            d["labelling"] = self.labelling.to_json()
        if self.coords is not None:
            d["coords"] = self.coords
        return d

    @classmethod
    def from_json(cls, d: dict) -> "CorpusInstance":
        g = PlaneGraph.from_json(d["graph"])
        lab = CptLabelling.from_json(g, d["labelling"]) if "labelling" in d else None
        return cls(d["name"], g, lab, d.get("coords"), list(d.get("tags", [])))


@dataclass
class Corpus:
    name: str
    instances: list[CorpusInstance]

    def __iter__(self) -> Iterator[CorpusInstance]:
        return iter(self.instances)

    def __len__(self) -> int:
        return len(self.instances)

    def to_json(self) -> dict:
        return {"name": self.name, "instances": [i.to_json() for i in self.instances]}

    @classmethod
    def from_json(cls, d: dict) -> "Corpus":
        return cls(d["name"], [CorpusInstance.from_json(i) for i in d["instances"]])

    def save(self, path: str | Path):
        Path(path).write_text(json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Corpus":
        return cls.from_json(json.loads(Path(path).read_text()))


def _triangle() -> PlaneGraph:
    return PlaneGraph({0: [1, 2], 1: [2, 0], 2: [0, 1]}, (0, 1))


def henneberg_step(g: PlaneGraph, rng: random.Random, v: int, split_bias: float = 0.5) -> PlaneGraph:
    """One planar Henneberg move adding vertex ``v``: a degree-2 vertex inside a
    face, or a degree-3 vertex that splits a boundary edge of a face."""
    while True:
        fid = rng.randrange(len(g.faces))
        trace = g.faces[fid]
        k = len(trace)
        if rng.random() >= split_bias:
            i, j = rng.sample(range(k), 2)
            if trace[i].tail == trace[j].tail:
                continue
            return insert_vertex(g, v, fid, [i, j])
        i = rng.randrange(k)
        a, b = trace[i].tail, trace[(i + 1) % k].tail
        rest = [j for j in range(k) if trace[j].tail not in (a, b)]
        if a == b or not rest or not g.has_edge(a, b):
            continue
        j = rng.choice(rest)
        try:
            h = insert_vertex(g, v, fid, [i, (i + 1) % k, j])
        except EmbeddingError:
            continue
        return remove_edge(h, a, b)


def henneberg_graph(n: int, rng: random.Random, split_bias: float = 0.5) -> PlaneGraph:
    g = _triangle()
    for v in range(3, n):
        g = henneberg_step(g, rng, v, split_bias)
    return g


def augment(g: PlaneGraph, rng: random.Random, extra: int) -> PlaneGraph:
    """Add up to ``extra`` random chords inside faces."""
    for _ in range(extra):
        cands = []
        for fid, trace in enumerate(g.faces):
            k = len(trace)
            for i in range(k):
                for j in range(k):
                    a, b = trace[i].tail, trace[j].tail
                    if a != b and not g.has_edge(a, b):
                        cands.append((fid, i, j))
        if not cands:
            break
        fid, i, j = rng.choice(cands)
        g = insert_edge_in_face(g, fid, i, j)
    return g


def henneberg_corpus(
    n_max: int, count: int, seed: int, *, augmented: bool = False, n_min: int = 3, split_bias: float = 0.5
) -> Corpus:
    """Plane Laman graphs (or rigid supergraphs when ``augmented``) with
    ``n_min <= n <= n_max``; deterministic under ``seed``."""
    if n_max < 3:
        raise ValueError("n_max must be at least 3")
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(max(3, n_min), n_max)
        g = henneberg_graph(n, rng, split_bias)
        tags = ["henneberg", "laman"]
        if augmented:
            g = augment(g, rng, rng.randint(1, 3))
            tags = ["henneberg", "augmented"] if g.e > 2 * g.n - 3 else tags
        out.append(CorpusInstance(f"{'aug' if augmented else 'hb'}-{seed}-{i}", g, tags=tags))
    return Corpus(f"henneberg(n_max={n_max},count={count},seed={seed},augmented={augmented})", out)


def random_connected_graph(n: int, rng: random.Random, extra: int) -> tuple[int, list[tuple[int, int]]]:
    """Random spanning tree plus ``extra`` random edges (not necessarily planar)."""
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        u, v = order[i], order[rng.randrange(i)]
        edges.add((min(u, v), max(u, v)))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in edges]
    rng.shuffle(pairs)
    edges.update(pairs[:extra])
    return n, sorted(edges)


def random_graphs(count: int, seed: int, n_max: int = 10) -> list[tuple[int, list[tuple[int, int]]]]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(2, n_max)
        target = 2 * n - 3 + rng.randint(-3, 3)
        extra = max(0, min(target - (n - 1), n * (n - 1) // 2 - (n - 1)))
        out.append(random_connected_graph(n, rng, extra))
    return out


def non_gl_cpts(graphs: Iterable[PlaneGraph], limit: int) -> list[CptLabelling]:
    """CPT labellings violating the generalized Laman condition."""
    out = []
    for g in graphs:
        if 2 * g.e > ANGLE_CAP:
            continue
        for l in search_all_cpt_labellings(g):
            if not enumerate_gl_subsets(l).ok:
                out.append(l)
                if len(out) >= limit:
                    return out
    return out


def is_valid_cpt(l: CptLabelling) -> bool:
    return not cpt_violations(l)


def laman_check(g: PlaneGraph) -> bool:
    return g.e == 2 * g.n - 3 and is_generically_rigid(g).rigid


def _two_adjacent_cubic_non_pointed(l: CptLabelling) -> tuple[int, int] | None:
    g = l.graph
    np_ = l.non_pointed
    for a, b in g.edges:
        if a in np_ and b in np_ and g.degree(a) == 3 and g.degree(b) == 3:
            return (a, b)
    return None


def flexible_variant(g: PlaneGraph, rng: random.Random) -> PlaneGraph | None:
    """Drop an independent edge from an over-braced graph so that the edge
    count stays at least ``2n - 3`` while rigidity is lost."""
    verdict = is_generically_rigid(g)
    if not verdict.redundant_edges:
        return None
    for a, b in rng.sample(list(verdict.laman_edges), len(verdict.laman_edges)):
        h = remove_edge(g, a, b)
        if h.e >= 2 * h.n - 3 and not is_generically_rigid(h).rigid:
            return h
    return None


def non_gl_corpus(count: int, seed: int, *, cap: int = 30) -> Corpus:
    """CPT labellings violating the generalized Laman condition, found by
    exhaustive search on small plane graphs.  Tags mark rigid graphs, the
    pattern of two adjacent degree-3 non-pointed vertices meeting only five
    edges, and pointed labellings of non-rigid graphs."""
    rng = random.Random(seed)
    picked: list[CorpusInstance] = []
    want_tags = ("two-cubic-non-pointed", "non-rigid-pointed")
    have = {t: 0 for t in want_tags}
    round_ = 0
    while (len(picked) < count or min(have.values()) == 0) and round_ < 200:
        base = henneberg_corpus(8, 1, rng.randrange(1 << 30), augmented=True, n_min=5).instances[0].graph
        round_ += 1
        variants = [(base, True)]
        flex = flexible_variant(base, rng)
        if flex is not None:
            variants.append((flex, False))
        for g, rigid in variants:
            if 2 * g.e > cap:
                continue
            for l in search_all_cpt_labellings(g, cap=cap):
                if enumerate_gl_subsets(l).ok:
                    continue
                tags = ["non-gl", "rigid" if rigid else "non-rigid"]
                if rigid and _two_adjacent_cubic_non_pointed(l):
                    tags.append("two-cubic-non-pointed")
                if not rigid and not l.non_pointed:
                    tags.append("non-rigid-pointed")
                fresh = [t for t in tags if t in have and have[t] == 0]
                if len(picked) >= count and not fresh:
                    continue
                for t in tags:
                    if t in have:
                        have[t] += 1
                picked.append(CorpusInstance(f"nongl-{seed}-{len(picked)}", g, l, tags=tags))
                break
    return Corpus(f"non_gl(count={count},seed={seed})", picked)
