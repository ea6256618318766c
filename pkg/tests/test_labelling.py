from __future__ import annotations

import json
from pathlib import Path

import pytest

from pseudotri import examples as ex
from pseudotri.cpt import SMALL, count_summary, generalized_laman, three_corner_property, validate_cpt
from pseudotri.labelling import (
    InternalInvariantError,
    NotRigidError,
    candidate_edges,
    choose_edge_degree3,
    extend_degree2,
    extend_degree3,
    label_cpt,
    label_cpt_run,
    pick_reduction_vertex,
    pseudo_triangle_frame,
)
from pseudotri.oracle import Corpus
from pseudotri.plane_graph import PlaneGraph, remove_edge, remove_vertex, replace_path
from pseudotri.rigidity import is_generically_rigid, laman_subgraph, restores_rigidity

FIXTURES = Path(__file__).parent / "fixtures"

# Every consecutive pair of neighbours of vertex 3 is already an edge, so only
# pairs two apart in its rotation can brace G \ 3 (found by corpus search).
SKIP_PAIR_GRAPH = {
    "n": 6,
    "rotations": [[1, 2], [0, 3, 5, 2], [0, 1, 4, 3], [1, 2, 4, 5], [2, 5, 3], [1, 3, 4]],
    "outer": [0, 1],
}


def test_k3_gets_the_unique_cpt(k3, k3_cpt):
    assert label_cpt(k3) == k3_cpt


def test_mercedes_gets_pointed_generalized_laman_cpt(mercedes):
    l = label_cpt(mercedes)
    s = validate_cpt(l)
    assert s.x == 0
    assert generalized_laman(l)


def test_octahedron_has_three_non_pointed_vertices():
    l = label_cpt(ex.octahedron())
    s = validate_cpt(l)
    assert (s.e, s.x, s.y) == (12, 3, 3)
    assert generalized_laman(l)


def test_full_audit_checks_three_corners():
    run = label_cpt_run(ex.triangulated_hexagon(), audit="full")
    assert three_corner_property(run.labelling)
    assert run.steps


def test_non_rigid_input_rejected_with_deficiency():
    with pytest.raises(NotRigidError) as exc:
        label_cpt(ex.cycle(5))
    assert exc.value.dof == 2


def test_too_small_input_rejected():
    g = PlaneGraph({0: [1], 1: [0]}, (0, 1))
    with pytest.raises(ValueError):
        label_cpt(g)


def test_output_is_deterministic():
    g = ex.octahedron()
    assert label_cpt(g) == label_cpt(g)


# -------------------------------------------------------- reduction choice
def test_pick_prefers_degree_two_vertex():
    g = ex.two_triangles_sharing_edge()
    # vertices 2 and 3 both have degree two; ties go to the lowest id
    assert pick_reduction_vertex(g, laman_subgraph(g)) == (2, 2)


def test_pick_on_k4_minus_edge():
    lam = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3)]
    assert pick_reduction_vertex(ex.k4(), lam) == (2, 2)


def test_pick_on_triangulated_hexagon():
    g = ex.triangulated_hexagon()
    v, d = pick_reduction_vertex(g, laman_subgraph(g))
    assert d in (2, 3)


def test_pick_rejects_non_laman_degrees():
    with pytest.raises(InternalInvariantError):
        pick_reduction_vertex(ex.triangle(), [(0, 1)])


def test_wheel_minus_spoke_hub_takes_rim_diagonal():
    g = remove_edge(ex.wheel(4), 0, 4)
    assert not is_generically_rigid(remove_vertex(g, 0)).rigid
    a, b = choose_edge_degree3(g, 0)
    assert {a, b} == {1, 3}
    assert restores_rigidity(remove_vertex(g, 0), a, b)


def test_skip_pair_chosen_when_consecutive_pairs_are_edges():
    g = PlaneGraph.from_json(SKIP_PAIR_GRAPH)
    rot = list(g.neighbors(3))
    assert all(g.has_edge(rot[i], rot[(i + 1) % 4]) for i in range(4))
    a, b = choose_edge_degree3(g, 3)
    assert {a, b} == {1, 4}
    assert rot.index(b) - rot.index(a) in (2, -2)
    assert list(candidate_edges(g, 3)) == [(1, 4), (2, 5)]


# --------------------------------------------------------------- extension
def test_extend_degree2_on_pseudo_edge_makes_v_pointed():
    # vertex 3 of the Mercedes graph has both neighbours on one side of the outer triangle
    g = ex.mercedes()
    sub = label_cpt(remove_vertex(g, 3))
    new, plan = extend_degree2(g, 3, sub)
    assert plan.case == "outer" or plan.case == "a.1"
    assert new.is_pointed(3)
    validate_cpt(new)


def _cases_over_corpus():
    cases = {}
    for name in ("henneberg.json", "augmented.json"):
        for inst in Corpus.load(FIXTURES / name):
            for s in label_cpt_run(inst.graph).steps:
                cases.setdefault(s.case, []).append(s)
    return cases


def test_all_degree2_cases_occur_with_expected_pointedness():
    cases = _cases_over_corpus()
    assert {"outer", "a.1", "a.2", "b"} <= set(cases)
    assert all(s.v_pointed for s in cases["a.1"])
    assert not any(s.v_pointed for s in cases["a.2"])


def test_non_pointed_vertices_stay_non_pointed():
    g = ex.octahedron()
    for v in g.vertices:
        gv = remove_vertex(g, v)
        if not is_generically_rigid(gv).rigid:
            continue
        sub = label_cpt(gv)
        new, _ = extend_degree2(g, v, sub)
        assert sub.non_pointed <= new.non_pointed | {v}


def test_extend_degree3_keeps_three_neighbours_when_v_pointed():
    # the triangular prism is Laman with every vertex of degree three
    run = label_cpt_run(ex.prism())
    steps = [s for s in run.steps if s.kind == "degree3"]
    assert steps
    for s in steps:
        assert s.keepers == (3 if s.v_pointed else 4)
        assert s.monotone


def test_extend_degree3_direct_call():
    g = ex.prism()
    v = 0
    gv = remove_vertex(g, v)
    assert not is_generically_rigid(gv).rigid
    e = choose_edge_degree3(g, v)
    sub = label_cpt(replace_path(g, v, *e))
    new, plan = extend_degree3(g, v, e, sub)
    validate_cpt(new)
    assert generalized_laman(new)
    assert plan.edge == e
    assert len(new.big_angles(v)) <= 1


def test_prism_labels_pointed():
    l = label_cpt(ex.prism())
    assert count_summary(l).x == 0


def test_pseudo_triangle_frame(mercedes_cpt):
    g = mercedes_cpt.graph
    for fid in g.bounded_faces():
        fr = pseudo_triangle_frame(mercedes_cpt, fid)
        trace = g.faces[fid]
        assert set(fr.corners) == {d.tail for d in trace if mercedes_cpt[(d.tail, d.head)] is SMALL}
        assert sum(len(c) - 1 for c in fr.pseudo_edges) == len(trace)


def test_trace_records_are_json():
    run = label_cpt_run(ex.octahedron())
    for s in run.steps:
        json.dumps(s.to_json())
    assert [s.n for s in run.steps] == sorted(s.n for s in run.steps)


def test_on_step_callback_sees_every_step():
    seen = []
    run = label_cpt_run(ex.octahedron(), on_step=seen.append)
    assert seen == run.steps


def test_engine_matches_frozen_labellings():
    corpus = Corpus.load(FIXTURES / "labelled.json")
    assert len(corpus) >= 100
    for inst in corpus:
        assert label_cpt(inst.graph) == inst.labelling, inst.name
