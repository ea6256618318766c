"""Hand-built plane graphs and labellings used by the tests, the CLI and the corpus."""

from __future__ import annotations

import math
from typing import Iterable, Mapping

from .cpt import BIG, SMALL, CptLabelling
from .plane_graph import PlaneGraph, from_drawing


def _ring(k: int, r: float = 10.0, phase: float = 90.0) -> list[tuple[float, float]]:
    return [
        (r * math.cos(math.radians(phase + 360.0 * i / k)), r * math.sin(math.radians(phase + 360.0 * i / k)))
        for i in range(k)
    ]


def cycle_edges(vs: list[int]) -> list[tuple[int, int]]:
    return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]


def labelling_from_smalls(g: PlaneGraph, smalls: Mapping[frozenset[int], Iterable[int]]) -> CptLabelling:
    """Bounded faces are looked up by vertex set; listed vertices get SMALL."""
    label = {}
    for fid, trace in enumerate(g.faces):
        verts = frozenset(d.tail for d in trace)
        small = set() if fid == g.outer_face else set(smalls.get(verts, ()))
        for d in trace:
            label[(d.tail, d.head)] = SMALL if d.tail in small else BIG
    return CptLabelling(g, label)


def all_small_inside(g: PlaneGraph) -> CptLabelling:
    """BIG on the outer face, SMALL everywhere else."""
    label = {}
    for fid, trace in enumerate(g.faces):
        for d in trace:
            label[(d.tail, d.head)] = BIG if fid == g.outer_face else SMALL
    return CptLabelling(g, label)


def triangle() -> PlaneGraph:
    return from_drawing(_ring(3), cycle_edges([0, 1, 2]))


def triangle_cpt() -> CptLabelling:
    return all_small_inside(triangle())


def k4() -> PlaneGraph:
    return from_drawing(_ring(3) + [(0.0, 0.0)], cycle_edges([0, 1, 2]) + [(3, 0), (3, 1), (3, 2)])


def path(k: int) -> PlaneGraph:
    return from_drawing([(float(i), float(i * i % 3)) for i in range(k)], [(i, i + 1) for i in range(k - 1)])


def star(k: int) -> PlaneGraph:
    return from_drawing([(0.0, 0.0)] + _ring(k), [(0, i) for i in range(1, k + 1)])


def cycle(k: int) -> PlaneGraph:
    return from_drawing(_ring(k), cycle_edges(list(range(k))))


def wheel(k: int) -> PlaneGraph:
    """Hub 0 joined to a k-cycle 1..k."""
    return from_drawing([(0.0, 0.0)] + _ring(k), cycle_edges(list(range(1, k + 1))) + [(0, i) for i in range(1, k + 1)])


def octahedron() -> PlaneGraph:
    pts = _ring(3, 10.0, 90.0) + _ring(3, 3.0, 270.0)
    edges = cycle_edges([0, 1, 2]) + cycle_edges([3, 4, 5])
    edges += [(3, 1), (3, 2), (4, 2), (4, 0), (5, 0), (5, 1)]
    return from_drawing(pts, edges)


def prism() -> PlaneGraph:
    pts = _ring(3, 10.0) + _ring(3, 3.0)
    return from_drawing(pts, cycle_edges([0, 1, 2]) + cycle_edges([3, 4, 5]) + [(0, 3), (1, 4), (2, 5)])


def cube() -> PlaneGraph:
    """Cube graph; vertex i has binary coordinates (i>>2, i>>1, i) & 1."""
    pts = {0: (-10.0, -10.0), 1: (10.0, -10.0), 3: (10.0, 10.0), 2: (-10.0, 10.0),
           4: (-3.0, -3.0), 5: (3.0, -3.0), 7: (3.0, 3.0), 6: (-3.0, 3.0)}
    edges = [(a, b) for a in range(8) for b in range(a + 1, 8) if bin(a ^ b).count("1") == 1]
    return from_drawing(pts, edges)


def two_triangles_sharing_edge() -> PlaneGraph:
    return from_drawing([(0.0, 0.0), (4.0, 0.0), (2.0, 3.0), (2.0, -3.0)], [(0, 1), (1, 2), (2, 0), (0, 3), (3, 1)])


def two_triangles_sharing_vertex() -> PlaneGraph:
    pts = [(0.0, 0.0), (-4.0, 1.0), (-4.0, -1.0), (4.0, 1.0), (4.0, -1.0)]
    return from_drawing(pts, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])


def triangle_with_tail() -> PlaneGraph:
    pts = [(0.0, 0.0), (4.0, 0.0), (2.0, 3.0), (2.0, 6.0), (2.0, 9.0)]
    return from_drawing(pts, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])


def triangulated_hexagon() -> PlaneGraph:
    """Hexagon 0..5 with a fan of diagonals from vertex 0."""
    return from_drawing(_ring(6), cycle_edges(list(range(6))) + [(0, 2), (0, 3), (0, 4)])


# Outer triangle 0,1,2; vertex 3 sits near side 01, 4 near 12, 5 near 20.  The
# bounded faces are the triangles 0-1-3, 1-2-4, 2-0-5 and the three-pointed
# star hexagon 0-3-1-4-2-5 whose reflex vertices are 3, 4, 5.
MERCEDES_POINTS = _ring(3, 10.0) + _ring(3, 2.0, 150.0)


def mercedes() -> PlaneGraph:
    pts = list(MERCEDES_POINTS)
    edges = cycle_edges([0, 1, 2]) + [(0, 3), (3, 1), (1, 4), (4, 2), (2, 5), (5, 0)]
    return from_drawing(pts, edges)


def mercedes_cpt() -> CptLabelling:
    g = mercedes()
    return labelling_from_smalls(
        g,
        {
            frozenset({0, 1, 3}): {0, 1, 3},
            frozenset({1, 2, 4}): {1, 2, 4},
            frozenset({2, 0, 5}): {2, 0, 5},
            frozenset({0, 1, 2, 3, 4, 5}): {0, 1, 2},
        },
    )


def spider5() -> PlaneGraph:
    """Five-vertex tree: centre 0 with legs 1, 2 and 3-4."""
    pts = [(0.0, 0.0), (-3.0, -2.0), (3.0, -2.0), (0.0, 3.0), (0.0, 6.0)]
    return from_drawing(pts, [(0, 1), (0, 2), (0, 3), (3, 4)])


def spider5_plane_labels() -> CptLabelling:
    """The tree drawn with its unbounded face as a pseudo-triangle: every
    vertex has one BIG angle, leaving three SMALL angles on the single face."""
    g = spider5()
    label = {}
    for v in g.vertices:
        keys = g.angle_keys_at(v)
        for i, k in enumerate(keys):
            label[k] = BIG if i == 0 else SMALL
    return CptLabelling(g, label)


def five_edge_pair() -> PlaneGraph:
    """K4 on 0..3 with a second triangle 0-4-5 glued along vertex 0 and
    braced by 3-4 and 3-5."""
    rot = {0: [1, 3, 4, 5, 2], 1: [0, 2, 3], 2: [0, 3, 1], 3: [0, 1, 2, 5, 4], 4: [0, 3, 5], 5: [0, 4, 3]}
    return PlaneGraph(rot, (0, 1))


def five_edge_pair_cpt() -> CptLabelling:
    """A rigid CPT that is not generalized Laman: the adjacent non-pointed
    vertices 4 and 5 have degree three, so together they meet five edges
    where six are needed."""
    g = five_edge_pair()
    small_all = {frozenset(f): f for f in ({0, 2, 1}, {0, 3, 4}, {0, 4, 5}, {1, 2, 3}, {3, 5, 4})}
    small_all[frozenset({0, 5, 3, 2})] = {0, 5, 3}
    return labelling_from_smalls(g, small_all)


# ----------------------------------------------------------------- surfaces
def octahedron_torus():
    """Octahedron as the circulant graph on Z6 with steps 1 and 2, tiling
    the torus by the six squares i, i+1, i+3, i+2."""
    from .surfaces import SurfaceGraph

    return SurfaceGraph({i: [(i + 1) % 6, (i + 2) % 6, (i - 1) % 6, (i - 2) % 6] for i in range(6)})


def octahedron_torus_pointed():
    """Every square gets its BIG angle at its own index vertex."""
    from .surfaces import SurfaceCpt

    sg = octahedron_torus()
    label = {}
    for face in sg.faces:
        verts = {v for v, _ in face}
        owner = next(i for i in range(6) if verts == {i, (i + 1) % 6, (i + 3) % 6, (i + 2) % 6})
        for k in face:
            label[k] = BIG if k[0] == owner else SMALL
    return SurfaceCpt(sg, label)


def sphere(g: PlaneGraph):
    from .surfaces import SurfaceGraph

    return SurfaceGraph(g.rotations)


def cube_sphere_cpt():
    """Cube on the sphere with poles 0 and 7 non-pointed: each square has
    its BIG angle at the vertex farthest from the pole it touches."""
    from .surfaces import SurfaceCpt

    sg = sphere(cube())
    label = {}
    for face in sg.faces:
        verts = {v for v, _ in face}
        pole = 0 if 0 in verts else 7
        far = next(v for v in verts if bin(v ^ pole).count("1") == 2)
        for k in face:
            label[k] = BIG if k[0] == far else SMALL
    return SurfaceCpt(sg, label)


def _icosahedron() -> dict[int, tuple[float, float, float]]:
    phi = (1 + 5 ** 0.5) / 2
    pts = []
    for a in (1, -1):
        for b in (phi, -phi):
            pts += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    return dict(enumerate(pts))


def k6_projective_plane():
    """K6 as the antipodal quotient of the icosahedron (ten triangles on the
    projective plane).  An edge is negative when the icosahedron edge leaves
    a representative toward the antipode of the other representative."""
    from .surfaces import SurfaceGraph

    pts = _icosahedron()

    def key(p):
        return tuple(round(c, 9) for c in p)

    index = {key(p): i for i, p in pts.items()}
    reps = [i for i, p in pts.items() if next(c for c in p if abs(c) > 1e-9) > 0]
    cls = {}
    for r, i in enumerate(reps):
        cls[i] = (r, 1)
        cls[index[key(tuple(-c for c in pts[i]))]] = (r, -1)
    rot, signs = {}, {}
    for r, i in enumerate(reps):
        p = pts[i]
        nbrs = [j for j, q in pts.items() if j != i and abs(sum((a - b) ** 2 for a, b in zip(p, q)) - 4.0) < 1e-6]
        # ccw order around the outward normal p
        e1 = [q - c for q, c in zip(pts[nbrs[0]], p)]
        e2 = [p[1] * e1[2] - p[2] * e1[1], p[2] * e1[0] - p[0] * e1[2], p[0] * e1[1] - p[1] * e1[0]]

        def ang(j):
            d = [q - c for q, c in zip(pts[j], p)]
            return math.atan2(sum(a * b for a, b in zip(d, e2)), sum(a * b for a, b in zip(d, e1)))

        nbrs.sort(key=ang)
        rot[r] = [cls[j][0] for j in nbrs]
        for j in nbrs:
            signs[(r, cls[j][0])] = cls[j][1]
    return SurfaceGraph(rot, signs)


def spider5_sphere():
    from .surfaces import SurfaceCpt

    l = spider5_plane_labels()
    return SurfaceCpt(sphere(l.graph), dict(l.label))
