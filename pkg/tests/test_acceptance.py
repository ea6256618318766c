"""Acceptance suite: each test checks one criterion at its stated size,
tolerance and time budget, and prints a single PASS/FAIL line."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import pytest
from _support import load, points, push_across_big_chord

from pseudotri import examples as ex
from pseudotri.cli import run as cli_run
from pseudotri.cpt import (
    corners,
    generalized_laman,
    generalized_laman_dual,
    predicted_c1,
    three_corner_property,
    validate_cpt,
)
from pseudotri.labelling import label_cpt_run
from pseudotri.oracle import enumerate_gl_subsets, random_graphs, rank_rigidity_oracle
from pseudotri.plane_graph import SubComplex, faces_nondegenerate
from pseudotri.rigidity import is_generically_rigid
from pseudotri.stretch import EmbeddedGraph, StretchError, classify_angles, geometric_counts, stretch, verify_stretch
from pseudotri.surfaces import check_surface_cpt, from_plane, pointed_feasible, search_surface_cpts


@pytest.fixture
def say(capsys):
    def emit(num: int, title: str, ok: bool, seconds: float, detail: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} ({detail}; {seconds:.2f}s)")

    return emit


@dataclass
class EngineRun:
    """Labelling of every graph of the Henneberg-style corpora, shared by the
    criteria that inspect engine output."""

    seconds: float = 0.0
    items: list = field(default_factory=list)  # (instance, labelling, steps)


@pytest.fixture(scope="module")
def engine():
    out = EngineRun()
    t0 = time.perf_counter()
    for name in ("henneberg", "augmented", "min_degree3"):
        for inst in load(name):
            r = label_cpt_run(inst.graph)
            out.items.append((inst, r.labelling, r.steps))
    out.seconds = time.perf_counter() - t0
    return out


def _stretch_succeeds(l) -> bool:
    try:
        emb = stretch(l, check_precondition=False)
    except StretchError:
        return False
    return verify_stretch(emb, l).ok


# ----------------------------------------------------------------------- 1
def test_count_identity(engine, say):
    t0 = time.perf_counter()
    labellings = [l for _, l, _ in engine.items]
    labellings += [i.labelling for i in load("labelled")] + [i.labelling for i in load("non_gl")]
    labellings += [ex.triangle_cpt(), ex.mercedes_cpt(), ex.five_edge_pair_cpt()]
    labellings = [l for l in labellings if l.graph.n <= 12]
    bad = []
    for l in labellings:
        s = validate_cpt(l)
        if s.e != 3 * s.x + 2 * s.y - 3:
            bad.append(l)
    dt = time.perf_counter() - t0
    ok = len(labellings) >= 200 and not bad and dt < 5
    say(1, "e = 3x + 2y - 3 on every CPT", ok, dt, f"{len(labellings)} CPTs, {len(bad)} violations")
    assert len(labellings) >= 200
    assert not bad
    assert dt < 5


# ----------------------------------------------------------------------- 2
def test_drawing_count_equality_and_breakage(say):
    t0 = time.perf_counter()
    corpus = load("labelled")
    not_tight = []
    for inst in corpus:
        c = geometric_counts(inst.graph.edges, points(inst))
        if c is None or not c["pseudo_triangulation"] or c["e"] != 3 * c["x"] + 2 * c["y"] - 3:
            not_tight.append(inst.name)
    for l in (ex.triangle_cpt(), ex.mercedes_cpt()):
        emb = stretch(l)
        c = geometric_counts(l.graph.edges, emb.coords)
        if c is None or c["e"] != 3 * c["x"] + 2 * c["y"] - 3:
            not_tight.append(repr(l))
    broken = undetected = 0
    for inst in corpus:
        g, l = inst.graph, inst.labelling
        for v in g.vertices:
            if not l.is_pointed(v) or g.face_of_angle(l.big_angles(v)[0]) == g.outer_face:
                continue
            moved = push_across_big_chord(g, l, points(inst), v)
            broken += 1
            c = geometric_counts(g.edges, moved)
            strict = c is not None and c["e"] < 3 * c["x"] + 2 * c["y"] - 3
            if not strict and verify_stretch(EmbeddedGraph(g, moved), l).ok:
                undetected += 1
            break
    dt = time.perf_counter() - t0
    ok = not not_tight and broken >= 20 and not undetected and dt < 30
    say(2, "stretched drawings are tight, broken ones are caught", ok, dt,
        f"{len(corpus) + 2} tight checks, {len(not_tight)} failures; {broken} broken, {undetected} undetected")
    assert not not_tight
    assert broken >= 20 and undetected == 0
    assert dt < 30


# ----------------------------------------------------------------------- 3
def test_pebble_game_matches_rank(say):
    t0 = time.perf_counter()
    graphs = random_graphs(500, seed=2024, n_max=10)
    flips = sum(
        is_generically_rigid(g).rigid != rank_rigidity_oracle(g, trials=3, seed=k, rel_tol=1e-8).rigid
        for k, g in enumerate(graphs)
    )
    rigid = sum(is_generically_rigid(g).rigid for g in graphs)
    dt = time.perf_counter() - t0
    ok = len(graphs) >= 500 and flips == 0 and dt < 60
    say(3, "pebble game vs rigidity-matrix rank", ok, dt, f"{len(graphs)} graphs ({rigid} rigid), {flips} disagreements")
    assert flips == 0
    assert dt < 60


# ----------------------------------------------------------------------- 4
def test_labelling_pipeline(engine, say):
    t0 = time.perf_counter()
    failures = []
    laman = aug = 0
    for inst, l, _ in engine.items:
        g = inst.graph
        assert g.n <= 8
        problems = []
        try:
            validate_cpt(l)
        except ValueError as exc:
            problems.append(str(exc))
        if not enumerate_gl_subsets(l).ok:
            problems.append("not generalized Laman")
        if g.e == 2 * g.n - 3:
            laman += 1
            if l.non_pointed:
                problems.append("Laman input gave a non-pointed labelling")
        elif "augmented" in inst.tags:
            aug += 1
        if problems:
            failures.append((inst.name, problems))
    dt = engine.seconds + time.perf_counter() - t0
    ok = not failures and laman >= 100 and aug >= 50 and dt < 120
    say(4, "rigid plane graphs get valid generalized-Laman CPTs", ok, dt,
        f"{laman} Laman + {aug} augmented, {len(failures)} failures")
    assert laman >= 100 and aug >= 50
    assert not failures, failures[:3]
    assert dt < 120


# ----------------------------------------------------------------------- 5
def test_four_way_equivalence(engine, say):
    t0 = time.perf_counter()
    non_gl = [i.labelling for i in load("non_gl")] + [ex.five_edge_pair_cpt()]
    labellings = [l for _, l, _ in engine.items] + [i.labelling for i in load("labelled")] + non_gl
    mismatches = []
    tally = {True: 0, False: 0}
    for l in labellings:
        views = (
            bool(generalized_laman(l)),
            bool(generalized_laman_dual(l)),
            faces_nondegenerate(l.graph) and bool(three_corner_property(l)),
            _stretch_succeeds(l),
        )
        if len(set(views)) != 1:
            mismatches.append((repr(l), views))
        tally[views[0]] += 1
    dt = time.perf_counter() - t0
    ok = not mismatches and len(non_gl) >= 20 and tally[False] >= 20 and dt < 180
    say(5, "four views of the generalized Laman property agree", ok, dt,
        f"{tally[True]} positive, {tally[False]} negative, {len(mismatches)} mismatches")
    assert len(non_gl) >= 20 and tally[False] >= 20
    assert not mismatches, mismatches[:3]
    assert dt < 180


# ----------------------------------------------------------------------- 6
def _connected_edge_sets(edges: list[tuple[int, int]]):
    m = len(edges)
    for mask in range(1, 1 << m):
        es = [edges[i] for i in range(m) if mask >> i & 1]
        adj: dict[int, list[int]] = {}
        for a, b in es:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        seen, stack = {es[0][0]}, [es[0][0]]
        while stack:
            for y in adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) == len(adj):
            yield es


def test_type1_corner_formula(engine, say):
    t0 = time.perf_counter()
    checked = mismatches = graphs = 0
    for inst, l, _ in engine.items:
        g = inst.graph
        if g.n > 7:
            continue
        graphs += 1
        pieces = [SubComplex.single_vertex(g, v) for v in g.vertices]
        for es in _connected_edge_sets(sorted(g.edges)):
            h = SubComplex.from_edges(g, es)
            if h.is_simply_connected():
                pieces.append(h)
        for h in pieces:
            checked += 1
            mismatches += corners(h, l).c1 != predicted_c1(h, l)
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and checked > 0 and dt < 120
    say(6, "type-1 corners = e - 3x - 2y + 3 + b", ok, dt,
        f"{checked} simply connected subcomplexes of {graphs} CPTs, {mismatches} mismatches")
    assert checked > 0 and mismatches == 0
    assert dt < 120


# ----------------------------------------------------------------------- 7
def test_degree3_status_counts(engine, say):
    t0 = time.perf_counter()
    steps = [s for _, _, ss in engine.items for s in ss if s.kind == "degree3"]
    bad = [s for s in steps if s.keepers != (3 if s.v_pointed else 4) or not s.monotone]
    dt = time.perf_counter() - t0
    pointed = sum(s.v_pointed for s in steps)
    ok = steps and not bad
    say(7, "degree-3 extensions keep 3 (pointed) or 4 neighbour statuses", bool(ok), dt,
        f"{len(steps)} extensions ({pointed} with v pointed), {len(bad)} violations")
    assert steps
    assert not bad, [s.to_json() for s in bad[:3]]


# ----------------------------------------------------------------------- 8
def test_surface_values(say):
    t0 = time.perf_counter()
    cube = check_surface_cpt(ex.cube_sphere_cpt())
    torus = check_surface_cpt(ex.octahedron_torus_pointed())
    prism = search_surface_cpts(from_plane(ex.prism().rotations))
    prism_x = {check_surface_cpt(c).x for c in prism}
    octa_sphere = from_plane(ex.octahedron().rotations)
    dt = time.perf_counter() - t0
    checks = {
        "cube": (cube.e, cube.x, cube.y, cube.g) == (12, 2, 6, 0) and cube.identity_holds,
        "torus": (torus.e, torus.x, torus.y, torus.g) == (12, 0, 6, 1) and torus.identity_holds,
        "prism": bool(prism) and prism_x == {3},
        "octahedron": not pointed_feasible(octa_sphere),
    }
    ok = all(checks.values()) and dt < 1
    say(8, "closed-surface CPT values", ok, dt, ", ".join(f"{k} {'ok' if v else 'WRONG'}" for k, v in checks.items()))
    assert all(checks.values()), checks
    assert dt < 1


# ----------------------------------------------------------------------- 9
def test_round_trip_and_determinism(engine, say, tmp_path):
    t0 = time.perf_counter()
    labellings = [l for _, l, _ in engine.items] + [i.labelling for i in load("labelled")]
    wrong = [repr(l) for l in labellings if classify_angles(stretch(l, seed=0)).labels() != l.label]
    same_coords = all(stretch(l, seed=5).coords == stretch(l, seed=5).coords for l in labellings[:20])
    reports = []
    for k, inst in enumerate(list(load("henneberg"))[:5]):
        gp = tmp_path / f"g{k}.json"
        gp.write_text(json.dumps(inst.graph.to_json()))
        first = cli_run(["pipeline", str(gp), "--out-dir", str(tmp_path / f"a{k}"), "--seed", "11"], env={})
        second = cli_run(["pipeline", str(gp), "--out-dir", str(tmp_path / f"b{k}"), "--seed", "11"], env={})
        same_files = all(
            (tmp_path / f"a{k}" / n).read_bytes() == (tmp_path / f"b{k}" / n).read_bytes()
            for n in ("labelling.json", "coords.json", "drawing.svg")
        )
        reports.append(first == second and first[0] == 0 and same_files)
    dt = time.perf_counter() - t0
    ok = not wrong and same_coords and all(reports)
    say(9, "classify(stretch(l)) = l and reproducible reports", ok, dt,
        f"{len(labellings)} labellings, {len(wrong)} mismatches; {sum(reports)}/{len(reports)} reports identical")
    assert not wrong, wrong[:3]
    assert same_coords and all(reports)
