"""Inductive construction of generalized-Laman CPT labellings.

``label_cpt`` peels off a vertex ``v`` of minimum degree in a spanning Laman
subgraph, labels the smaller graph recursively and extends the labelling
back over ``v``:

* if ``G \\ v`` is still rigid, ``v`` is re-inserted into the region ``T`` it
  occupied (:func:`extend_degree2`);
* otherwise an edge ``ab`` between two neighbours restores rigidity, the
  smaller graph is ``G \\ v + ab`` with ``ab`` routed along ``a - v - b``, and
  ``v`` replaces the edge (:func:`extend_degree3`).

Labels of the re-inserted region follow the case analysis for pseudo-triangles
(neighbours nearest to the corners keep a BIG angle facing the corner, every
other new angle is SMALL).  Each extension is then certified by brute force;
degree-3 extensions that fail are repaired by exchanging a BIG angle at ``v``
with a SMALL angle at ``a`` or ``b``, and if that fails the next candidate
edge is tried.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .cpt import BIG, SMALL, CptLabelling, Label, cpt_violations, generalized_laman, three_corner_property, validate_cpt
from .plane_graph import AngleKey, PlaneGraph, remove_vertex, replace_path
from .rigidity import is_generically_rigid, restores_rigidity, run_pebble_game


class NotRigidError(ValueError):
    def __init__(self, dof: int, laman_edges):
        self.dof = dof
        self.laman_edges = list(laman_edges)
        super().__init__(
            f"graph is not generically rigid: pebble game accepts {len(self.laman_edges)} independent edges, "
            f"{dof} short of 2n-3"
        )


class InternalInvariantError(RuntimeError):
    """A step the construction guarantees has failed; carries a state dump."""

    def __init__(self, message: str, state: dict):
        self.state = state
        super().__init__(f"{message}\n{json.dumps(state, sort_keys=True, default=str)}")


class ExtensionFailed(Exception):
    pass


@dataclass(frozen=True)
class PseudoTriangleFrame:
    face: int
    corners: tuple[int, int, int]
    pseudo_edges: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]


def pseudo_triangle_frame(l: CptLabelling, fid: int) -> PseudoTriangleFrame:
    verts = l.graph.face_vertices(fid)
    labels = l.face_labels(fid)
    pos = [i for i, lab in enumerate(labels) if lab is SMALL]
    if len(pos) != 3 or fid == l.graph.outer_face:
        raise ValueError(f"face {fid} is not a pseudo-triangle")
    k = len(verts)
    chains = []
    for j in range(3):
        i0, i1 = pos[j], pos[(j + 1) % 3]
        span = (i1 - i0) % k
        chains.append(tuple(verts[(i0 + t) % k] for t in range(span + 1)))
    return PseudoTriangleFrame(fid, tuple(verts[i] for i in pos), tuple(chains))


@dataclass
class ExtensionPlan:
    vertex: int
    case: str
    new_labels: dict[AngleKey, Label]
    flips: list[tuple[int, AngleKey]] = field(default_factory=list)
    edge: tuple[int, int] | None = None


@dataclass
class StepRecord:
    n: int
    vertex: int
    deg_laman: int
    kind: str
    case: str
    edge: tuple[int, int] | None
    flips: list
    v_pointed: bool
    neighbours: int
    keepers: int
    monotone: bool
    candidates_tried: int = 1

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["edge"] = list(self.edge) if self.edge else None
        d["flips"] = [[v, list(k)] for v, k in self.flips]
        return d


# ------------------------------------------------------------ region model
@dataclass
class _Item:
    vertex: int
    old: Label
    neighbour: bool
    fwd: AngleKey | None = None  # angle in the new face that starts here
    bwd: AngleKey | None = None  # angle in the new face that ends here


def _faces_around(g: PlaneGraph, v: int) -> list[tuple[int, list[int]]]:
    """For each neighbour w_t (ccw), the chain of the face of ``g`` between
    ``w_t`` and ``w_{t+1}``: vertices strictly between them."""
    out = []
    for w in g.neighbors(v):
        trace = g.faces[g.face_of_dart[(v, w)]]
        i = trace.index((v, w))
        seq = [trace[(i + j) % len(trace)].tail for j in range(len(trace))]
        out.append((w, seq[2:-1]))
    return out


def _region_items(g: PlaneGraph, v: int, old: CptLabelling, start: int, stop: int, old_key) -> list[_Item]:
    """Boundary of the region filled by ``v`` between neighbours ``start`` and
    ``stop`` (indices into the rotation of ``v``; ``stop`` exclusive, cyclic)."""
    ring = _faces_around(g, v)
    k = len(ring)
    items: list[_Item] = []
    t = start
    while True:
        w, chain = ring[t]
        nxt = chain[0] if chain else ring[(t + 1) % k][0]
        items.append(_Item(w, old.label[old_key(w, (w, nxt))], True, fwd=(w, nxt), bwd=(w, v)))
        for i, c in enumerate(chain):
            nc = chain[i + 1] if i + 1 < len(chain) else ring[(t + 1) % k][0]
            items.append(_Item(c, old.label[(c, nc)], False))
        t = (t + 1) % k
        if t == stop:
            break
    return items


def _fill(v: int, items: list[_Item], bounded: bool, wrap: bool, outer_start: int | None, anchor=None) -> dict:
    """New labels for the angles at ``v`` and at its neighbours inside one
    region.  ``wrap`` marks the degree-3 situation where the region closes
    through ``v`` itself (the removed edge joins the last item to the first)."""
    m = len(items)
    nbrs = [i for i, it in enumerate(items) if it.neighbour]
    lab: dict[AngleKey, Label] = {}
    for i in nbrs:
        it = items[i]
        if it.fwd is not None:
            lab[it.fwd] = SMALL
            lab[(v, it.vertex)] = SMALL
        if it.bwd is not None:
            lab[it.bwd] = SMALL

    if not bounded:
        # the outer face of the result runs from neighbour outer_start to the next one
        j = nbrs.index(outer_start)
        p, q = items[nbrs[j]], items[nbrs[(j + 1) % len(nbrs)]]
        lab[(v, p.vertex)] = BIG
        lab[p.fwd] = BIG
        lab[q.bwd] = BIG
        return lab

    corners = [i for i, it in enumerate(items) if it.old is SMALL]
    if len(corners) != 3:
        raise ExtensionFailed(f"region has {len(corners)} corners")

    def span(i0, i1):
        return [(i0 + t) % m for t in range(((i1 - i0) % m) + 1)]

    pedges = [(corners[j], corners[(j + 1) % 3]) for j in range(3)]
    if anchor is None:
        if wrap:
            anchor = next(p for p in pedges if (m - 1) in span(*p) and 0 in span(*p) and p[0] != 0)
        else:
            anchor = next((p for p in pedges if sum(i in span(*p) for i in nbrs) >= 2), None)
            if anchor is None:
                return _fill_spread(v, items, corners)
    s, t = anchor
    on_p = span(s, t)
    r = next(c for c in corners if c not in (s, t))
    p_nbrs = [i for i in on_p if items[i].neighbour]
    if wrap:
        # order along the pseudo-edge is cyclic through the wrap
        p_nbrs = sorted(p_nbrs, key=lambda i: (i - s) % m)
    s1, t1 = p_nbrs[0], p_nbrs[-1]
    if s1 != s:
        lab[items[s1].bwd] = BIG
    if t1 != t:
        lab[items[t1].fwd] = BIG
    rest = [i for i in nbrs if i not in on_p]
    if rest:
        def dist(i):
            return min((i - r) % m, (r - i) % m), (r - i) % m
        r1 = min(rest, key=dist)
        if r1 != r:
            if r1 in span(t, r):
                lab[items[r1].fwd] = BIG
            else:
                lab[items[r1].bwd] = BIG
    else:
        lab[(v, items[t1].vertex)] = BIG
    return lab


def _fill_spread(v: int, items: list[_Item], corners: list[int]) -> dict:
    """Neighbours on pairwise different pseudo-edges: two or three of them."""
    m = len(items)
    nbrs = [i for i, it in enumerate(items) if it.neighbour]
    faces = []
    for j, i in enumerate(nbrs):
        q = nbrs[(j + 1) % len(nbrs)]
        inner = [(i + t) % m for t in range(1, (q - i) % m or m)]
        faces.append((i, q, sum(items[c].old is SMALL for c in inner)))
    v_opts: list[int | None] = [None] + list(range(len(faces)))
    if len(nbrs) == 2:
        v_opts = list(range(len(faces)))
    nb_opts = []
    for i in nbrs:
        nb_opts.append(["none"] if items[i].old is SMALL else ["fwd", "bwd"])
    for vb in v_opts:
        for choice in itertools.product(*nb_opts):
            ch = dict(zip(nbrs, choice))
            ok = True
            for fi, (i, q, inner_small) in enumerate(faces):
                small = inner_small + (vb != fi) + (ch[i] != "fwd") + (ch[q] != "bwd")
                if small != 3:
                    ok = False
                    break
            if ok:
                lab = {}
                for fi, (i, q, _) in enumerate(faces):
                    lab[(v, items[i].vertex)] = BIG if vb == fi else SMALL
                for i in nbrs:
                    lab[items[i].fwd] = BIG if ch[i] == "fwd" else SMALL
                    lab[items[i].bwd] = BIG if ch[i] == "bwd" else SMALL
                return lab
    raise ExtensionFailed("no labelling for neighbours on distinct pseudo-edges")


def _assemble(g: PlaneGraph, old: CptLabelling, new: dict) -> CptLabelling:
    label = {}
    for a in g.angles:
        k = a.key
        label[k] = new[k] if k in new else old.label[k]
    return CptLabelling(g, label)


def _status_changes(g: PlaneGraph, v: int, old: CptLabelling, new: CptLabelling) -> tuple[int, bool]:
    """(neighbours of v keeping pointedness, no vertex went non-pointed -> pointed)."""
    old_p, new_p = old.pointed, new.pointed
    keepers = sum((w in old_p) == (w in new_p) for w in g.neighbors(v))
    monotone = not any(u in new_p and u not in old_p for u in old.graph.vertices if u != v)
    return keepers, monotone


def _certify(g: PlaneGraph, v: int, old: CptLabelling, new: CptLabelling, gl_cap: int) -> str | None:
    problems = cpt_violations(new)
    if problems:
        return "; ".join(problems)
    s = new.graph.e - (3 * len(new.non_pointed) + 2 * len(new.pointed) - 3)
    if s:
        return "edge count mismatch"
    _, monotone = _status_changes(g, v, old, new)
    if not monotone:
        return "a non-pointed vertex became pointed"
    if g.n <= gl_cap and not generalized_laman(new, cap=gl_cap):
        return "generalized Laman property fails"
    return None


# --------------------------------------------------------------- extensions
def extend_degree2(g: PlaneGraph, v: int, sub: CptLabelling, *, gl_cap: int = 18) -> tuple[CptLabelling, ExtensionPlan]:
    """Extend a generalized-Laman CPT of ``g \\ v`` over ``v``."""
    k = g.degree(v)
    outer_nb = None
    for t, w in enumerate(g.neighbors(v)):
        if g.face_of_dart[(v, w)] == g.outer_face:
            outer_nb = t
    items = _region_items(g, v, sub, 0, 0, lambda w, key: (w, g.pred(w, v)))
    bounded = outer_nb is None
    if not bounded:
        outer_start = [i for i, it in enumerate(items) if it.neighbour][outer_nb]
        attempts = [dict(outer_start=outer_start)]
        case = "outer"
    else:
        corners = [i for i, it in enumerate(items) if it.old is SMALL]
        m = len(items)
        nbrs = [i for i, it in enumerate(items) if it.neighbour]
        if len(corners) != 3:
            raise InternalInvariantError(
                "region of v is not a pseudo-triangle", {"v": v, "corners": len(corners), "n": g.n}
            )
        attempts = []
        for j in range(3):
            s, t = corners[j], corners[(j + 1) % 3]
            on = [(s + q) % m for q in range(((t - s) % m) + 1)]
            if sum(i in on for i in nbrs) >= 2:
                attempts.append(dict(anchor=(s, t)))
        case = "a.1" if attempts else "b"
        if not attempts:
            attempts = [dict()]
    failures = []
    for opts in attempts:
        try:
            lab = _fill(v, items, bounded, False, opts.get("outer_start"), opts.get("anchor"))
        except ExtensionFailed as exc:
            failures.append(str(exc))
            continue
        new = _assemble(g, sub, lab)
        if case == "a.1" and not new.is_pointed(v):
            case = "a.2"
        problem = _certify(g, v, sub, new, gl_cap)
        if problem is None:
            return new, ExtensionPlan(v, case, lab)
        failures.append(problem)
    raise InternalInvariantError(
        "degree-2 extension failed",
        {"v": v, "graph": _dump(g), "sub": _dump_labels(sub), "failures": failures, "degree": k},
    )


def _flip_options(g: PlaneGraph, v: int, a: int, b: int, base: CptLabelling) -> Iterator[list[tuple[int, AngleKey]]]:
    """BIG-at-v / SMALL-at-endpoint exchanges inside a face where v is BIG."""
    def singles(lab: CptLabelling, skip_face=None):
        out = []
        for kv in lab.big_angles(v):
            fid = g.face_of_angle(kv)
            if fid == skip_face or fid == g.outer_face:
                continue
            for z in (a, b):
                if lab.is_pointed(z):
                    continue
                for kz in g.angle_keys_at(z):
                    if g.face_of_angle(kz) == fid:
                        out.append([(v, kv), (z, kz)])
        return out

    nbig = len(base.big_angles(v))
    if nbig <= 1:
        yield []
    for first in singles(base):
        yield first
        after = base.with_labels({k: base.label[k].flipped() for _, k in first})
        fid = g.face_of_angle(first[0][1])
        for second in singles(after, skip_face=fid):
            yield first + second


def extend_degree3(
    g: PlaneGraph, v: int, edge: tuple[int, int], sub: CptLabelling, *, gl_cap: int = 18
) -> tuple[CptLabelling, ExtensionPlan]:
    """Extend a generalized-Laman CPT of ``g \\ v + ab`` over ``v``, removing ``ab``."""
    a, b = edge
    rot = list(g.neighbors(v))
    ia, ib = rot.index(a), rot.index(b)
    labels: dict[AngleKey, Label] = {}

    def old_key_factory(first, last):
        def old_key(w, key):
            if w == last:
                return (w, first)
            return (w, g.pred(w, v))
        return old_key

    for first, last, i0, i1 in ((a, b, ia, ib), (b, a, ib, ia)):
        items = _region_items(g, v, sub, i0, i1, old_key_factory(first, last))
        # the closing item is the far endpoint, reached by the last face
        w_last = g.neighbors(v)[i1]
        ring = _faces_around(g, v)
        prev_t = (i1 - 1) % len(rot)
        tail_chain = ring[prev_t][1]
        items.append(_Item(w_last, sub.label[(w_last, first)], True, fwd=None, bwd=(w_last, v)))
        items[0].bwd = None
        side_faces = [g.face_of_dart[(v, rot[(i0 + t) % len(rot)])] for t in range((i1 - i0) % len(rot))]
        bounded = g.outer_face not in side_faces
        outer_start = None
        if not bounded:
            t = side_faces.index(g.outer_face)
            outer_start = [i for i, it in enumerate(items) if it.neighbour][t]
        del tail_chain
        try:
            labels.update(_fill(v, items, bounded, True, outer_start))
        except (ExtensionFailed, StopIteration) as exc:
            raise InternalInvariantError(
                "degree-3 region fill failed", {"v": v, "edge": edge, "error": str(exc), "graph": _dump(g)}
            ) from None
    base = _assemble(g, sub, labels)
    tried = []
    for flips in _flip_options(g, v, a, b, base):
        new = base.with_labels({k: base.label[k].flipped() for _, k in flips})
        problem = _certify(g, v, sub, new, gl_cap)
        if problem is None:
            return new, ExtensionPlan(v, "edge-split", labels, flips=flips, edge=(a, b))
        tried.append(problem)
    raise ExtensionFailed(f"no flip combination certifies edge {edge}: {tried}")


# ------------------------------------------------------------- choices
def pick_reduction_vertex(g: PlaneGraph, laman_edges) -> tuple[int, int]:
    deg = {v: 0 for v in g.vertices}
    for u, w in laman_edges:
        deg[u] += 1
        deg[w] += 1
    v = min(g.vertices, key=lambda x: (deg[x], x))
    if deg[v] not in (2, 3):
        raise InternalInvariantError("minimum Laman degree outside {2, 3}", {"v": v, "deg": deg[v]})
    return v, deg[v]


def candidate_edges(g: PlaneGraph, v: int, gv: PlaneGraph | None = None) -> Iterator[tuple[int, int]]:
    """Edges between neighbours of ``v`` restoring rigidity of ``g \\ v``:
    consecutive neighbours first, then neighbours two apart, starting from the
    lowest-id neighbour."""
    gv = gv or remove_vertex(g, v)
    rot = list(g.neighbors(v))
    start = rot.index(min(rot))
    rot = rot[start:] + rot[:start]
    k = len(rot)
    state = run_pebble_game(gv)
    seen = set()
    for step in (1, 2):
        for i in range(k):
            a, b = rot[i], rot[(i + step) % k]
            key = (min(a, b), max(a, b))
            if a == b or key in seen:
                continue
            seen.add(key)
            if gv.has_edge(a, b):
                continue
            if restores_rigidity(gv, a, b, state):
                yield (a, b)


def choose_edge_degree3(g: PlaneGraph, v: int) -> tuple[int, int]:
    for e in candidate_edges(g, v):
        return e
    raise InternalInvariantError("no edge between neighbours restores rigidity", {"v": v, "graph": _dump(g)})


# ------------------------------------------------------------------ driver
def _dump(g: PlaneGraph) -> dict:
    return {"rotations": {str(v): list(r) for v, r in g.rotations.items()}, "outer": list(g.outer_dart)}


def _dump_labels(l: CptLabelling) -> dict:
    return {f"{k[0]},{k[1]}": lab.value for k, lab in sorted(l.label.items())}


def base_labelling(g: PlaneGraph) -> CptLabelling:
    if g.n != 3 or g.e != 3:
        raise InternalInvariantError("base case needs a triangle", {"graph": _dump(g)})
    label = {}
    for fid, trace in enumerate(g.faces):
        for d in trace:
            label[(d.tail, d.head)] = BIG if fid == g.outer_face else SMALL
    return CptLabelling(g, label)


@dataclass
class LabelRun:
    labelling: CptLabelling
    steps: list[StepRecord]


class _Engine:
    def __init__(self, audit: bool | str, gl_cap: int, on_step: Callable[[StepRecord], None] | None):
        self.audit = audit
        self.gl_cap = gl_cap
        self.steps: list[StepRecord] = []
        self.on_step = on_step

    def label(self, g: PlaneGraph) -> CptLabelling:
        if g.n == 3:
            return base_labelling(g)
        verdict = is_generically_rigid(g)
        if not verdict.rigid:
            raise InternalInvariantError("intermediate graph lost rigidity", {"graph": _dump(g)})
        v, d = pick_reduction_vertex(g, verdict.laman_edges)
        gv = remove_vertex(g, v)
        if d == 2 or is_generically_rigid(gv).rigid:
            sub = self.label(gv)
            new, plan = extend_degree2(g, v, sub, gl_cap=self.gl_cap)
            kind, tried = "degree2", 1
        else:
            tried = 0
            failures = []
            for edge in candidate_edges(g, v, gv):
                tried += 1
                mark = len(self.steps)
                sub = self.label(replace_path(g, v, *edge))
                try:
                    new, plan = extend_degree3(g, v, edge, sub, gl_cap=self.gl_cap)
                    break
                except ExtensionFailed as exc:
                    failures.append(str(exc))
                    del self.steps[mark:]
            else:
                raise InternalInvariantError(
                    "no candidate edge extends", {"v": v, "graph": _dump(g), "failures": failures}
                )
            kind = "degree3"
        keepers, monotone = _status_changes(g, v, sub, new)
        rec = StepRecord(
            n=g.n, vertex=v, deg_laman=d, kind=kind, case=plan.case, edge=plan.edge, flips=plan.flips,
            v_pointed=new.is_pointed(v), neighbours=g.degree(v), keepers=keepers, monotone=monotone,
            candidates_tried=tried,
        )
        self._audit(new, rec)
        self.steps.append(rec)
        if self.on_step:
            self.on_step(rec)
        return new

    def _audit(self, l: CptLabelling, rec: StepRecord):
        if not self.audit:
            return
        try:
            validate_cpt(l)
        except ValueError as exc:
            raise InternalInvariantError(f"step produced an invalid CPT: {exc}", rec.to_json()) from None
        if l.graph.n <= self.gl_cap and not generalized_laman(l, cap=self.gl_cap):
            raise InternalInvariantError("step lost the generalized Laman property", rec.to_json())
        if self.audit == "full" and not three_corner_property(l):
            raise InternalInvariantError("step lost the three-corner property", rec.to_json())


def label_cpt_run(
    g: PlaneGraph,
    *,
    audit: bool | str = True,
    gl_cap: int = 18,
    on_step: Callable[[StepRecord], None] | None = None,
) -> LabelRun:
    if g.n < 3:
        raise ValueError("labelling needs at least three vertices")
    verdict = is_generically_rigid(g)
    if not verdict.rigid:
        raise NotRigidError(verdict.dof, verdict.laman_edges)
    eng = _Engine(audit, gl_cap, on_step)
    lab = eng.label(g)
    return LabelRun(lab, eng.steps)


def label_cpt(g: PlaneGraph, **kw) -> CptLabelling:
    """Generalized-Laman CPT labelling of a generically rigid plane graph."""
    return label_cpt_run(g, **kw).labelling
