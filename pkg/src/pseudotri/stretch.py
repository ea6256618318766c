"""Straight-line realizations of CPT labellings and their exact verification.

The solver pins the outer face to a convex polygon and solves one linear
system for the interior vertices.  A non-pointed vertex sits at a weighted
average of all its neighbours.  A pointed vertex whose BIG angle opens from
neighbour ``a`` to neighbour ``b`` sits on the segment ``ab`` pulled a
fraction ``t`` toward the centroid of the three corners of the face holding
that angle, which makes the angle reflex; stacks of such vertices separate
at scales ``t``, ``t^2``, ...  Solutions are snapped to an
integer grid and only returned after :func:`verify_stretch` accepts them on
the snapped coordinates with exact integer predicates.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .cpt import BIG, SMALL, CptLabelling, Label, face_corners, generalized_laman, validate_cpt
from .plane_graph import PlaneGraph

Point = tuple[int, int]

PULLS = (0.3, 0.1, 0.03, 0.01)
GRID_BITS = (24, 40, 64)


class StretchError(RuntimeError):
    """No verified realization within the attempt budget."""


class PreconditionError(ValueError):
    pass


@dataclass
class EmbeddedGraph:
    graph: PlaneGraph
    coords: dict[int, tuple]

    def to_json(self) -> dict:
        return {"coords": [[_jsonable(c) for c in self.coords[v]] for v in self.graph.vertices]}

    @classmethod
    def from_json(cls, graph: PlaneGraph, data: Mapping) -> "EmbeddedGraph":
        pts = data.get("coords") if isinstance(data, Mapping) else None
        if not isinstance(pts, list) or len(pts) != graph.n:
            raise ValueError(f"coords must be a list of {graph.n} points")
        coords = {}
        for v, p in zip(graph.vertices, pts):
            if not (isinstance(p, list) and len(p) == 2 and all(isinstance(c, (int, float)) for c in p)):
                raise ValueError(f"bad point for vertex {v}: {p!r}")
            coords[v] = (p[0], p[1])
        return cls(graph, coords)


def _jsonable(c):
    if isinstance(c, Fraction):
        return float(c)
    return c


def _exact(c):
    return c if isinstance(c, (int, Fraction)) else Fraction(c)


# --------------------------------------------------------------- predicates
def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1])


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def orient(p, q, r) -> int:
    c = _cross(_sub(q, p), _sub(r, p))
    return (c > 0) - (c < 0)


def _on_segment(p, q, r) -> bool:
    """r collinear with pq and within its bounding box."""
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])


def segments_conflict(p1, p2, q1, q2, shared: bool) -> bool:
    """Do two segments meet anywhere except at a shared endpoint?"""
    if shared:
        # the shared endpoint is p1 == q1; conflict iff collinear and overlapping
        a, b = _sub(p2, p1), _sub(q2, q1)
        return _cross(a, b) == 0 and _dot(a, b) > 0
    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    return (
        (o1 == 0 and _on_segment(p1, p2, q1))
        or (o2 == 0 and _on_segment(p1, p2, q2))
        or (o3 == 0 and _on_segment(q1, q2, p1))
        or (o4 == 0 and _on_segment(q1, q2, p2))
    )


def _half(d) -> int:
    return 0 if (d[1] > 0 or (d[1] == 0 and d[0] > 0)) else 1


def _ccw_sorted(center, pts: dict[int, tuple]) -> list[int]:
    import functools

    def cmp(u, w):
        a, b = _sub(pts[u], center), _sub(pts[w], center)
        ha, hb = _half(a), _half(b)
        if ha != hb:
            return ha - hb
        c = _cross(a, b)
        return -1 if c > 0 else (1 if c < 0 else 0)

    return sorted(pts, key=functools.cmp_to_key(cmp))


def _same_cycle(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    i = list(b).index(a[0]) if a[0] in b else -1
    return i >= 0 and list(b[i:]) + list(b[:i]) == list(a)


def convex_hull(points: dict[int, tuple]) -> list[int]:
    """Strict convex hull vertices in ccw order (collinear points dropped)."""
    ids = sorted(points, key=lambda v: (points[v][0], points[v][1]))
    if len(ids) < 3:
        return ids

    def half(seq):
        h: list[int] = []
        for v in seq:
            while len(h) >= 2 and orient(points[h[-2]], points[h[-1]], points[v]) <= 0:
                h.pop()
            h.append(v)
        return h

    lower, upper = half(ids), half(reversed(ids))
    return lower[:-1] + upper[:-1]


# ------------------------------------------------------------ angle report
@dataclass
class AngleInfo:
    vertex: int
    key: tuple[int, int]
    face: int
    radians: float
    label: Label | None  # None marks an angle of exactly pi (or zero)


@dataclass
class GeometricAngleReport:
    angles: list[AngleInfo]
    pointed: dict[int, bool]
    face_small: dict[int, int]
    degenerate: list[tuple[int, int]]

    def labels(self) -> dict[tuple[int, int], Label]:
        return {a.key: a.label for a in self.angles if a.label is not None}

    @property
    def x(self) -> int:
        return sum(not p for p in self.pointed.values())

    @property
    def y(self) -> int:
        return sum(self.pointed.values())


def _angle_class(v, w, w2, deg: int, pts) -> Label | None:
    if deg == 1:
        return BIG
    a, b = _sub(pts[w], pts[v]), _sub(pts[w2], pts[v])
    c = _cross(a, b)
    if c > 0:
        return SMALL
    if c < 0:
        return BIG
    return None


def classify_angles(emb: EmbeddedGraph) -> GeometricAngleReport:
    """Class of every angle of the rotation system against pi, exactly."""
    g = emb.graph
    pts = {v: tuple(_exact(c) for c in emb.coords[v]) for v in g.vertices}
    infos, degenerate = [], []
    pointed = {v: False for v in g.vertices}
    face_small = {f: 0 for f in range(len(g.faces))}
    for ang in g.angles:
        v, w = ang.key
        w2 = g.succ(v, w)
        lab = _angle_class(v, w, w2, g.degree(v), pts)
        a = math.atan2(float(pts[w][1] - pts[v][1]), float(pts[w][0] - pts[v][0]))
        b = math.atan2(float(pts[w2][1] - pts[v][1]), float(pts[w2][0] - pts[v][0]))
        rad = (b - a) % (2 * math.pi) if g.degree(v) > 1 else 2 * math.pi
        infos.append(AngleInfo(v, ang.key, ang.face, rad, lab))
        if lab is None:
            degenerate.append(ang.key)
        elif lab is BIG:
            pointed[v] = True
        else:
            face_small[ang.face] += 1
    return GeometricAngleReport(infos, pointed, face_small, degenerate)


# ------------------------------------------------------------ verification
@dataclass
class StretchReport:
    ok: bool
    problems: list[str] = field(default_factory=list)
    e: int = 0
    x_geo: int = 0
    y_geo: int = 0

    @property
    def laman_slack(self) -> int:
        return 3 * self.x_geo + 2 * self.y_geo - 3 - self.e

    def to_json(self) -> dict:
        return {"ok": self.ok, "problems": self.problems, "e": self.e, "x_geo": self.x_geo, "y_geo": self.y_geo}

    def __bool__(self) -> bool:
        return self.ok


def drawing_problems(g: PlaneGraph, pts: dict[int, tuple]) -> list[str]:
    """Crossings and coincidences of the straight-line drawing."""
    problems = []
    seen = {}
    for v in g.vertices:
        if pts[v] in seen:
            problems.append(f"vertices {seen[pts[v]]} and {v} coincide")
        seen[pts[v]] = v
    edges = g.edges
    for i, (a, b) in enumerate(edges):
        for c, d in edges[i + 1 :]:
            common = {a, b} & {c, d}
            if common:
                s = common.pop()
                p = b if a == s else a
                q = d if c == s else c
                if segments_conflict(pts[s], pts[p], pts[s], pts[q], True):
                    problems.append(f"edges {a}-{b} and {c}-{d} overlap")
            elif segments_conflict(pts[a], pts[b], pts[c], pts[d], False):
                problems.append(f"edges {a}-{b} and {c}-{d} cross")
    return problems


def verify_stretch(emb: EmbeddedGraph, l: CptLabelling) -> StretchReport:
    g = l.graph
    if emb.graph != g:
        return StretchReport(False, ["drawing and labelling are over different graphs"])
    pts = {v: tuple(_exact(c) for c in emb.coords[v]) for v in g.vertices}
    problems = drawing_problems(g, pts)
    if problems:
        return StretchReport(False, problems, g.e)
    for v in g.vertices:
        order = _ccw_sorted(pts[v], {w: pts[w] for w in g.neighbors(v)})
        if not _same_cycle(order, g.neighbors(v)):
            problems.append(f"rotation at {v} is {order}, expected {list(g.neighbors(v))}")
    if problems:
        return StretchReport(False, problems, g.e)
    rep = classify_angles(emb)
    for info in rep.angles:
        want = l.label[info.key]
        if info.label is None:
            problems.append(f"angle at {info.vertex} toward {info.key[1]} is degenerate (exactly pi)")
        elif info.label is not want:
            problems.append(f"angle at {info.vertex} toward {info.key[1]} in face {info.face} is {info.label.value}, labelled {want.value}")
    hull = convex_hull(pts)
    outer = [d.tail for d in g.faces[g.outer_face]]
    if not _same_cycle(list(reversed(hull)), outer):
        problems.append(f"outer face {outer} is not the clockwise convex hull {list(reversed(hull))}")
    for fid in g.bounded_faces():
        if rep.face_small[fid] != 3:
            problems.append(f"face {fid} has {rep.face_small[fid]} convex angles")
    report = StretchReport(not problems, problems, g.e, rep.x, rep.y)
    if report.ok and report.laman_slack != 0:
        report.ok = False
        report.problems.append(f"edge count {g.e} differs from 3x+2y-3 = {g.e + report.laman_slack}")
    return report


def geometric_counts(g_edges: Sequence[tuple[int, int]], coords: Mapping[int, tuple]) -> dict:
    """Counts of an arbitrary straight-line drawing, independent of any
    labelling: edges, non-pointed and pointed vertices, and whether it is a
    pseudo-triangulation.  ``None`` when the drawing is not plane."""
    from .plane_graph import EmbeddingError, from_drawing

    pts = {v: tuple(_exact(c) for c in p) for v, p in coords.items()}
    try:
        g = from_drawing({v: (float(p[0]), float(p[1])) for v, p in pts.items()}, g_edges)
    except EmbeddingError:
        return None
    for v in g.vertices:
        order = _ccw_sorted(pts[v], {w: pts[w] for w in g.neighbors(v)})
        if not _same_cycle(order, g.neighbors(v)):
            g = _rotations_exact(g, pts)
            break
    if drawing_problems(g, pts):
        return None
    hull = convex_hull(pts)
    outer_candidates = [f for f, tr in enumerate(g.faces) if _same_cycle(list(reversed(hull)), [d.tail for d in tr])]
    rep = classify_angles(EmbeddedGraph(g, pts))
    pt = (
        not rep.degenerate
        and all(rep.face_small[f] == 3 for f in g.bounded_faces())
        and g.outer_face in outer_candidates
    )
    return {"e": g.e, "x": rep.x, "y": rep.y, "degenerate": bool(rep.degenerate), "pseudo_triangulation": pt}


def _rotations_exact(g: PlaneGraph, pts) -> PlaneGraph:
    rot = {v: _ccw_sorted(pts[v], {w: pts[w] for w in g.neighbors(v)}) for v in g.vertices}
    return PlaneGraph(rot, g.outer_dart, validate=False)


# ------------------------------------------------------------------ solver
def _outer_polygon(g: PlaneGraph, radius: float) -> dict[int, np.ndarray]:
    outer = [d.tail for d in g.faces[g.outer_face]]
    k = len(outer)
    return {
        v: np.array([radius * math.cos(-2 * math.pi * i / k + math.pi / 2), radius * math.sin(-2 * math.pi * i / k + math.pi / 2)])
        for i, v in enumerate(outer)
    }


def _solve(l: CptLabelling, t: float, rng: random.Random | None) -> dict[int, np.ndarray] | None:
    g = l.graph
    fixed = _outer_polygon(g, 1.0)
    inner = [v for v in g.vertices if v not in fixed]
    idx = {v: i for i, v in enumerate(inner)}
    m = len(inner)
    if m == 0:
        return fixed
    # x and y decouple: one m-by-m matrix, two right-hand sides
    A = np.zeros((m, m))
    rhs = np.zeros((m, 2))

    def add(row: int, u: int, c: float):
        if u in fixed:
            rhs[row] -= c * fixed[u]
        else:
            A[row, idx[u]] += c

    for v in inner:
        r = idx[v]
        bigs = l.big_angles(v)
        add(r, v, 1.0)
        if bigs:
            # just off the segment between the neighbours bounding the BIG
            # angle, pulled toward the corners of the face it opens into
            a = bigs[0][1]
            b = g.succ(v, a)
            fid = g.face_of_angle(bigs[0])
            fv = g.face_vertices(fid)
            corners = [fv[i] for i in face_corners(l, fid)]
            lam = 0.5 if rng is None else rng.uniform(0.25, 0.75)
            add(r, a, -(1 - t) * lam)
            add(r, b, -(1 - t) * (1 - lam))
            for c in corners:
                add(r, c, -t / len(corners))
        else:
            nbrs = g.neighbors(v)
            ws = [1.0 if rng is None else rng.uniform(0.5, 2.0) for _ in nbrs]
            total = sum(ws)
            for w, wt in zip(nbrs, ws):
                add(r, w, -wt / total)
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(sol)):
        return None
    out = dict(fixed)
    for v in inner:
        out[v] = sol[idx[v]]
    return out


def snap(coords: Mapping[int, np.ndarray], bits: int) -> dict[int, Point]:
    scale = float(1 << bits)
    return {v: (int(round(float(p[0]) * scale)), int(round(float(p[1]) * scale))) for v, p in coords.items()}


@dataclass
class StretchAttempt:
    pull: float
    randomized: bool
    bits: int | None
    problems: list[str]


def stretch(
    l: CptLabelling,
    *,
    seed: int = 0,
    iters: int = 24,
    check_precondition: bool = True,
    attempts: list | None = None,
) -> EmbeddedGraph:
    """Verified straight-line realization of a generalized-Laman CPT."""
    if check_precondition:
        validate_cpt(l)
        gl = generalized_laman(l)
        if not gl:
            raise PreconditionError(f"labelling is not generalized Laman; violating set {gl.witness}")
    rng = random.Random(seed)
    budget = iters
    tried = 0
    while tried < budget:
        randomized = tried >= len(PULLS)
        pull = PULLS[tried % len(PULLS)]
        sol = _solve(l, pull, rng if randomized else None)
        tried += 1
        if sol is None:
            if attempts is not None:
                attempts.append(StretchAttempt(pull, randomized, None, ["singular system"]))
            continue
        for bits in GRID_BITS:
            emb = EmbeddedGraph(l.graph, snap(sol, bits))
            rep = verify_stretch(emb, l)
            if attempts is not None:
                attempts.append(StretchAttempt(pull, randomized, bits, rep.problems[:3]))
            if rep.ok:
                return emb
    raise StretchError(f"no verified realization after {budget} solver attempts")


def rejection_stretch(l: CptLabelling, *, seed: int = 0, tries: int = 20000, grid: int = 1 << 12) -> EmbeddedGraph | None:
    """Oracle for small graphs: outer face pinned as in the solver, interior
    vertices sampled uniformly in the bounding square."""
    g = l.graph
    rng = random.Random(seed)
    fixed = snap(_outer_polygon(g, 1.0), 12)
    inner = [v for v in g.vertices if v not in fixed]
    for _ in range(tries):
        pts = dict(fixed)
        for v in inner:
            pts[v] = (rng.randint(-grid, grid), rng.randint(-grid, grid))
        emb = EmbeddedGraph(g, pts)
        if verify_stretch(emb, l).ok:
            return emb
    return None


# --------------------------------------------------------------------- svg
def draw_svg(emb: EmbeddedGraph, l: CptLabelling | None = None, *, size: int = 480, version: str = "") -> str:
    """SVG of the drawing; BIG angles get an arc at their vertex."""
    g = emb.graph
    pts = {v: (float(p[0]), float(p[1])) for v, p in emb.coords.items()}
    xs = [p[0] for p in pts.values()]
    ys = [p[1] for p in pts.values()]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-12)
    pad = 0.08 * size
    s = (size - 2 * pad) / span

    def tr(p):
        return (pad + (p[0] - min(xs)) * s, pad + (max(ys) - p[1]) * s)

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">']
    if version:
        lines.append(f"<!-- pseudotri {version} -->")
    for u, v in g.edges:
        (x1, y1), (x2, y2) = tr(pts[u]), tr(pts[v])
        lines.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="black" stroke-width="1.5"/>')
    if l is not None:
        r = 0.04 * size
        for (v, w), lab in sorted(l.label.items()):
            if lab is not BIG or l.graph.face_of_angle((v, w)) == l.graph.outer_face:
                continue
            w2 = g.succ(v, w)
            cx, cy = tr(pts[v])
            a0 = math.atan2(pts[w][1] - pts[v][1], pts[w][0] - pts[v][0])
            a1 = math.atan2(pts[w2][1] - pts[v][1], pts[w2][0] - pts[v][0])
            sweep = (a1 - a0) % (2 * math.pi) or 2 * math.pi
            x0, y0 = cx + r * math.cos(a0), cy - r * math.sin(a0)
            x1, y1 = cx + r * math.cos(a0 + sweep), cy - r * math.sin(a0 + sweep)
            large = 1 if sweep > math.pi else 0
            lines.append(
                f'<path d="M {x0:.2f} {y0:.2f} A {r:.2f} {r:.2f} 0 {large} 1 {x1:.2f} {y1:.2f}" fill="none" stroke="red" stroke-width="1.2"/>'
            )
    for v in g.vertices:
        x, y = tr(pts[v])
        fill = "white" if l is not None and not l.is_pointed(v) else "black"
        lines.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3.5" fill="{fill}" stroke="black"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
