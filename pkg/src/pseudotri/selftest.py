"""Oracle-agreement matrix behind ``pseudotri selftest``."""

from __future__ import annotations

from .cpt import generalized_laman, generalized_laman_dual, three_corner_property
from .labelling import label_cpt
from .oracle import (
    enumerate_gl_subsets,
    henneberg_corpus,
    non_gl_corpus,
    random_graphs,
    rank_rigidity_oracle,
    search_all_cpt_labellings,
)
from .plane_graph import faces_nondegenerate
from .rigidity import is_generically_rigid
from .stretch import StretchError, classify_angles, stretch


def run_selftest(
    *, seed: int = 0, quick: bool = False, rank_tol: float = 1e-8, rank_trials: int = 3, gl_cap: int = 18, search_cap: int = 26
) -> dict:
    matrix: dict[str, dict] = {}

    def row(name: str, checked: int, bad: list):
        matrix[name] = {"checked": checked, "mismatches": len(bad), "examples": bad[:3]}

    graphs = random_graphs(100 if quick else 500, seed)
    bad = []
    for i, g in enumerate(graphs):
        fast = is_generically_rigid(g).rigid
        slow = rank_rigidity_oracle(g, trials=rank_trials, seed=seed + i, rel_tol=rank_tol).rigid
        if fast != slow:
            bad.append({"graph": i, "pebble": fast, "rank": slow})
    row("pebble_vs_rank", len(graphs), bad)

    corpus = list(henneberg_corpus(7, 30 if quick else 100, seed)) + list(
        henneberg_corpus(7, 15 if quick else 50, seed + 1, augmented=True)
    )
    labellings = [label_cpt(inst.graph, gl_cap=gl_cap) for inst in corpus]
    non_gl = [inst.labelling for inst in non_gl_corpus(20, seed + 2)]

    bad = []
    for i, l in enumerate(labellings + non_gl):
        truth = enumerate_gl_subsets(l, cap=gl_cap).ok
        views = {
            "enumerate": bool(generalized_laman(l, cap=gl_cap)),
            "pebble": bool(generalized_laman(l, method="pebble")),
            "dual": bool(generalized_laman_dual(l)),
            "corners": faces_nondegenerate(l.graph) and bool(three_corner_property(l)),
        }
        if any(v != truth for v in views.values()):
            bad.append({"instance": i, "oracle": truth, **views})
    row("generalized_laman_views", len(labellings) + len(non_gl), bad)

    bad, checked = [], 0
    for i, l in enumerate(labellings):
        if 2 * l.graph.e > search_cap:
            continue
        checked += 1
        if l not in search_all_cpt_labellings(l.graph, cap=search_cap):
            bad.append({"instance": i})
    row("engine_within_search", checked, bad)

    bad = []
    for i, l in enumerate(labellings):
        try:
            emb = stretch(l, seed=seed)
            if classify_angles(emb).labels() != l.label:
                bad.append({"instance": i, "problem": "round trip"})
        except StretchError as exc:
            bad.append({"instance": i, "problem": str(exc)})
    row("stretch_round_trip", len(labellings), bad)

    bad = []
    for i, l in enumerate(non_gl):
        try:
            stretch(l, seed=seed, iters=8, check_precondition=False)
            bad.append({"instance": i})
        except StretchError:
            pass
    row("non_gl_not_stretchable", len(non_gl), bad)
    return matrix
