from __future__ import annotations

import itertools
import json

import pytest

from pseudotri import examples as ex
from pseudotri.cpt import (
    BIG,
    SMALL,
    CornerType,
    CptLabelling,
    InvalidCpt,
    LabellingInputError,
    corners,
    count_summary,
    cpt_violations,
    generalized_laman,
    generalized_laman_dual,
    predicted_c1,
    three_corner_property,
    validate_cpt,
)
from pseudotri.plane_graph import SubComplex, from_drawing, induced_subcomplex


# ---------------------------------------------------------------- validate
def test_k3_cpt_counts(k3_cpt):
    s = validate_cpt(k3_cpt)
    assert (s.e, s.x, s.y, s.f) == (3, 0, 3, 1)
    assert s.e == s.laman_bound


def test_mercedes_is_pointed_cpt(mercedes_cpt):
    s = validate_cpt(mercedes_cpt)
    assert s.x == 0 and s.y == 6 and s.e == 9


def test_tree_with_small_outer_angles_is_not_a_plane_cpt():
    l = ex.spider5_plane_labels()
    problems = cpt_violations(l)
    assert any("outer face" in p and "3 SMALL" in p for p in problems)
    with pytest.raises(InvalidCpt):
        validate_cpt(l)


def test_violations_name_face_and_vertex(k3_cpt):
    g = k3_cpt.graph
    inner = g.bounded_faces()[0]
    d = g.faces[inner][0]
    broken = k3_cpt.with_labels({(d.tail, d.head): BIG})
    problems = cpt_violations(broken)
    assert any(f"face {inner}" in p for p in problems)
    assert any(f"vertex {d.tail}" in p for p in problems)


def test_missing_label_is_input_error(k3_cpt):
    lab = dict(k3_cpt.label)
    lab.pop(next(iter(lab)))
    with pytest.raises(LabellingInputError):
        validate_cpt(CptLabelling(k3_cpt.graph, lab))


def test_square_without_diagonals_fails():
    c4 = ex.cycle(4)
    l = ex.all_small_inside(c4)
    assert any("4 SMALL" in p for p in cpt_violations(l))


def test_labelling_json_round_trip(mercedes_cpt):
    data = json.loads(json.dumps(mercedes_cpt.to_json()))
    assert CptLabelling.from_json(mercedes_cpt.graph, data) == mercedes_cpt
    assert all(set(a) == {"face", "index", "label"} for a in data["angles"])


def test_labelling_json_rejects_garbage(mercedes):
    with pytest.raises(LabellingInputError):
        CptLabelling.from_json(mercedes, {"angles": [{"face": 99, "index": 0, "label": "big"}]})
    with pytest.raises(LabellingInputError):
        CptLabelling.from_json(mercedes, {"angles": []})


# ----------------------------------------------------------------- corners
def test_whole_cpt_has_three_corners(mercedes_cpt):
    (h,) = induced_subcomplex(mercedes_cpt.graph, mercedes_cpt.graph.vertices)
    rep = corners(h, mercedes_cpt)
    assert rep.c1 + rep.c2 >= 3


def test_single_face_corners_are_its_small_vertices():
    l = ex.mercedes_cpt()
    g = l.graph
    for fid in g.bounded_faces():
        trace = g.faces[fid]
        h = SubComplex.from_edges(g, [(d.tail, d.head) for d in trace])
        smalls = {d.tail for d in trace if l[(d.tail, d.head)] is SMALL}
        got = {c.vertex for c in corners(h, l).corners}
        assert got == smalls


def test_mercedes_face_subcomplex_corner_formula(mercedes_cpt):
    g = mercedes_cpt.graph
    for fid in g.bounded_faces():
        trace = g.faces[fid]
        h = SubComplex.from_edges(g, [(d.tail, d.head) for d in trace])
        assert (h.e, h.b) in {(3, 3), (6, 6)}
        assert predicted_c1(h, mercedes_cpt) == 3
        assert corners(h, mercedes_cpt).c1 == 3


def test_type2_corner_on_non_pointed_vertex():
    g = ex.k4()
    l = ex.all_small_inside(g)
    assert 3 in l.non_pointed
    # the triangle 0-1-3 around the centre: 3 keeps two consecutive small angles outside it
    h = SubComplex.from_edges(g, [(0, 1), (1, 3), (3, 0)])
    kinds = {c.vertex: c.kind for c in corners(h, l).corners}
    assert kinds[3] is CornerType.TYPE2


# -------------------------------------------------------- generalized Laman
def test_k3_generalized_laman(k3_cpt):
    assert generalized_laman(k3_cpt)
    assert generalized_laman_dual(k3_cpt)
    assert three_corner_property(k3_cpt)


def test_mercedes_generalized_laman(mercedes_cpt):
    assert generalized_laman(mercedes_cpt)
    assert generalized_laman(mercedes_cpt, method="pebble")
    assert three_corner_property(mercedes_cpt)


def test_five_edge_pair_fails_with_complement_witness():
    l = ex.five_edge_pair_cpt()
    validate_cpt(l)
    assert {4, 5} <= l.non_pointed
    assert ex.five_edge_pair().degree(4) == ex.five_edge_pair().degree(5) == 3
    primal = generalized_laman(l)
    dual = generalized_laman_dual(l)
    assert not primal and not dual
    assert primal.witness == (0, 1, 2, 3)
    assert dual.witness == (4, 5)
    assert not generalized_laman(l, method="pebble")
    assert not three_corner_property(l)


def test_degree_one_vertex_breaks_dual_form():
    # triangle with a pendant vertex: the pendant vertex meets one edge
    l = _pendant_labelling()
    res = generalized_laman_dual(l)
    assert not res
    assert res.witness == (3,)


def _pendant_labelling() -> CptLabelling:
    g = from_drawing([(0, 0), (4, 0), (2, 3), (2, 6)], [(0, 1), (1, 2), (2, 0), (2, 3)])
    label = {}
    for fid, trace in enumerate(g.faces):
        for d in trace:
            label[(d.tail, d.head)] = BIG if fid == g.outer_face else SMALL
    return CptLabelling(g, label)


def test_degree_two_non_pointed_vertex_breaks_dual_form():
    # vertex 1 of the 4-cycle with chord 0-2 has degree two; give it no BIG angle
    g = from_drawing([(0, 0), (4, 0), (4, 4), (0, 4)], ex.cycle_edges([0, 1, 2, 3]) + [(0, 2)])
    label = {}
    for fid, trace in enumerate(g.faces):
        for d in trace:
            label[(d.tail, d.head)] = BIG if fid == g.outer_face else SMALL
    key = next(k for k, lab in label.items() if k[0] == 1 and lab is BIG)
    label[key] = SMALL
    l = CptLabelling(g, label)
    res = generalized_laman_dual(l)
    assert not res and res.witness == (1,)


def test_witness_is_smallest_then_lexicographic():
    l = ex.five_edge_pair_cpt()
    w = generalized_laman(l).witness
    g = l.graph
    weights = {v: 2 if v in l.pointed else 3 for v in g.vertices}
    for k in range(2, len(w) + 1):
        for sub in itertools.combinations(g.vertices, k):
            s = set(sub)
            bad = sum(u in s and v in s for u, v in g.edges) > sum(weights[v] for v in s) - 3
            if bad:
                assert (k, sub) >= (len(w), w)


def test_enumeration_refuses_above_cap(mercedes_cpt):
    with pytest.raises(ValueError):
        generalized_laman(mercedes_cpt, cap=5)


def test_count_summary_matches_identity_on_octahedron():
    from pseudotri.labelling import label_cpt

    l = label_cpt(ex.octahedron())
    s = count_summary(l)
    assert (s.e, s.x, s.y) == (12, 3, 3)
