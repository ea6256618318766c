"""Shared helpers for the test modules: fixture loading and drawing perturbations."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from pseudotri.cpt import SMALL
from pseudotri.oracle import Corpus
from pseudotri.stretch import EmbeddedGraph, verify_stretch

FIXTURES = Path(__file__).parent / "fixtures"

TOPOLOGY_WORDS = ("rotation", "cross", "overlap", "coincide")


def load(name: str) -> Corpus:
    return Corpus.load(FIXTURES / f"{name}.json")


def points(inst) -> dict:
    return {v: tuple(p) for v, p in zip(inst.graph.vertices, inst.coords)}


def _moved(pts: dict, v: int, q) -> dict:
    out = dict(pts)
    out[v] = q
    return out


def push_across_big_chord(g, l, pts: dict, v: int, s: Fraction = Fraction(1, 20)) -> dict | None:
    """Reflect pointed vertex ``v`` (scaled by ``s``) across the line through
    the two neighbours bounding its BIG angle; the BIG angle becomes convex."""
    big = l.big_angles(v)
    if not big:
        return None
    a = big[0][1]
    b = g.succ(v, a)
    (ax, ay), (bx, by), (vx, vy) = pts[a], pts[b], pts[v]
    dx, dy = bx - ax, by - ay
    t = Fraction((vx - ax) * dx + (vy - ay) * dy, dx * dx + dy * dy)
    px, py = ax + t * dx, ay + t * dy
    return _moved(pts, v, (px - s * (vx - px), py - s * (vy - py)))


def pull_through_small_chord(g, pts: dict, v: int, a: int, s: Fraction) -> dict:
    """Move ``v`` toward (and, for ``s > 1/2``, past) the midpoint of the chord
    spanned by the SMALL angle at ``v`` starting at ``a``."""
    b = g.succ(v, a)
    (ax, ay), (bx, by), (vx, vy) = pts[a], pts[b], pts[v]
    mx, my = Fraction(ax + bx, 2), Fraction(ay + by, 2)
    return _moved(pts, v, (vx + 2 * s * (mx - vx), vy + 2 * s * (my - vy)))


def angle_only_failure(rep) -> bool:
    """Verification failed on angle classes while the drawing kept its topology."""
    return not rep.ok and not any(w in p for p in rep.problems for w in TOPOLOGY_WORDS)


def small_angle_violation(inst):
    """A one-vertex move of the stored drawing after which some SMALL-labelled
    angle becomes reflex, the topology being unchanged; ``None`` if not found."""
    g, l = inst.graph, inst.labelling
    pts = points(inst)
    for v in g.vertices:
        for _, a in g.angle_keys_at(v):
            if l[(v, a)] is not SMALL:
                continue
            for s in (Fraction(1, 2), Fraction(9, 10), Fraction(11, 10), Fraction(3, 2)):
                moved = pull_through_small_chord(g, pts, v, a, s)
                rep = verify_stretch(EmbeddedGraph(g, moved), l)
                if angle_only_failure(rep) and any("is big, labelled small" in p for p in rep.problems):
                    return moved, rep
    return None
