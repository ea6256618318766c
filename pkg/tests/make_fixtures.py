"""Regenerate the committed corpus fixtures.

    python3 tests/make_fixtures.py

henneberg/augmented/non_gl come from ``pseudotri gen-corpus``; labelled.json
adds engine labellings and verified coordinates for graphs up to 12 vertices,
frozen so later runs can detect regressions; min_degree3.json holds Laman
graphs whose reductions all go through degree-3 vertices.
"""

from __future__ import annotations

from pathlib import Path

from pseudotri.cli import run
from pseudotri.labelling import label_cpt
from pseudotri.oracle import Corpus, CorpusInstance, henneberg_corpus
from pseudotri.stretch import stretch

HERE = Path(__file__).parent / "fixtures"
SEED = 1


def labelled_corpus() -> Corpus:
    out = []
    for aug in (False, True):
        c = henneberg_corpus(12, 60, SEED + 10 + aug, augmented=aug, n_min=9, split_bias=0.6)
        for inst in c:
            l = label_cpt(inst.graph)
            emb = stretch(l, seed=0)
            coords = [list(map(int, emb.coords[v])) for v in inst.graph.vertices]
            out.append(CorpusInstance(inst.name, inst.graph, l, coords, inst.tags + ["labelled"]))
    return Corpus(f"labelled(n<=12,seed={SEED})", out)


def min_degree3_corpus(count: int = 120) -> Corpus:
    """Laman graphs without degree-2 vertices, so the engine must take
    degree-3 reductions."""
    pool = henneberg_corpus(8, 3000, SEED + 20, split_bias=0.95, n_min=6)
    keep = [i for i in pool if min(i.graph.degree(v) for v in i.graph.vertices) >= 3][:count]
    for i in keep:
        i.tags.append("min-degree-3")
    return Corpus(f"min_degree3(n<=8,seed={SEED})", keep)


def main():
    code, _ = run(["gen-corpus", "--out-dir", str(HERE), "--seed", str(SEED), "--count", "160", "--n-max", "8"])
    assert code == 0
    labelled_corpus().save(HERE / "labelled.json")
    min_degree3_corpus().save(HERE / "min_degree3.json")


if __name__ == "__main__":
    main()
