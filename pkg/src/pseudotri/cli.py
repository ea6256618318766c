"""Command-line front end: ``pseudotri <command> ...``.

Every command prints a JSON report on stdout (keys sorted, so identical
inputs and seeds give identical bytes) and a one-line diagnostic on stderr
when something fails.  Exit codes: 0 success, 3 property false, 4 input
error, 5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
from pathlib import Path
from typing import Callable

from . import __version__
from .cpt import (
    GL_CAP,
    CptLabelling,
    InvalidCpt,
    LabellingInputError,
    count_summary,
    cpt_violations,
    generalized_laman,
    generalized_laman_dual,
    three_corner_property,
    validate_cpt,
)
from .labelling import InternalInvariantError, NotRigidError, label_cpt_run
from .plane_graph import EmbeddingError, PlaneGraph, faces_nondegenerate
from .rigidity import is_generically_rigid
from .stretch import EmbeddedGraph, PreconditionError, StretchError, draw_svg, stretch, verify_stretch
from .surfaces import SurfaceCpt, SurfaceCptViolation, SurfaceGraph, SurfaceInconsistency, check_surface_cpt, genus_of

OK, FALSE, INPUT, INTERNAL = 0, 3, 4, 5


class InputError(Exception):
    pass


class PropertyFalse(Exception):
    pass


# ------------------------------------------------------------------ settings
SETTINGS = {
    "gl_cap": ("PSEUDOTRI_GL_CAP", int, GL_CAP),
    "search_cap": ("PSEUDOTRI_SEARCH_CAP", int, 26),
    "rank_tol": ("PSEUDOTRI_RANK_TOL", float, 1e-8),
    "rank_trials": ("PSEUDOTRI_RANK_TRIALS", int, 3),
}


def load_settings(env=None) -> dict:
    env = os.environ if env is None else env
    out = {}
    for name, (var, typ, default) in SETTINGS.items():
        raw = env.get(var)
        if raw is None:
            out[name] = {"value": default, "source": "default"}
        else:
            try:
                out[name] = {"value": typ(raw), "source": f"env {var}"}
            except ValueError:
                raise InputError(f"{var}={raw!r} is not a valid {typ.__name__}") from None
    return out


# ------------------------------------------------------------------- report
class Report:
    def __init__(self, command: str, settings: dict, timings: bool):
        self.data: dict = {
            "command": command,
            "tool_version": __version__,
            "inputs": {},
            "verdicts": {},
            "settings": settings,
        }
        self.want_timings = timings
        self._t0 = time.perf_counter()

    def add_input(self, role: str, path: str, raw: bytes):
        self.data["inputs"][role] = {"path": os.path.basename(path), "sha256": hashlib.sha256(raw).hexdigest()}

    def verdict(self, key: str, value):
        self.data["verdicts"][key] = value

    def finish(self, code: int, diagnostic: str | None) -> str:
        self.data["exit_code"] = code
        self.data["diagnostic"] = diagnostic
        if self.want_timings:
            self.data["timings"] = {"seconds": round(time.perf_counter() - self._t0, 6)}
        return json.dumps(self.data, sort_keys=True, indent=2)


def _read_json(path: str, report: Report, role: str):
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {role} file {path}: {exc.strerror}") from None
    report.add_input(role, path, raw)
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{role} file {path} is not JSON: {exc}") from None


def _graph(path: str, report: Report) -> PlaneGraph:
    data = _read_json(path, report, "graph")
    try:
        return PlaneGraph.from_json(data)
    except (EmbeddingError, TypeError, AttributeError) as exc:
        raise InputError(f"invalid plane graph: {exc}") from None


def _labelling(g: PlaneGraph, path: str, report: Report) -> CptLabelling:
    data = _read_json(path, report, "labelling")
    try:
        return CptLabelling.from_json(g, data)
    except (LabellingInputError, TypeError, AttributeError) as exc:
        raise InputError(f"invalid labelling: {exc}") from None


def _coords(g: PlaneGraph, path: str, report: Report) -> EmbeddedGraph:
    data = _read_json(path, report, "coords")
    try:
        return EmbeddedGraph.from_json(g, data)
    except ValueError as exc:
        raise InputError(f"invalid coordinates: {exc}") from None


def _write(path: str | None, text: str):
    if path:
        Path(path).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _gl_check(l: CptLabelling, cap: int):
    return generalized_laman(l, cap=cap) if l.graph.n <= cap else generalized_laman(l, method="pebble")


# ------------------------------------------------------------------ commands
def cmd_check_rigid(a, r: Report) -> int:
    g = _graph(a.graph, r)
    v = is_generically_rigid(g)
    r.verdict("rigid", v.rigid)
    r.verdict("dof", v.dof)
    r.verdict("n", g.n)
    r.verdict("e", g.e)
    r.verdict("redundant_edges", [list(e) for e in v.redundant_edges])
    if not v.rigid:
        raise PropertyFalse(f"not generically rigid: {v.dof} degree(s) of freedom beyond rigid motions")
    return OK


def cmd_laman_sub(a, r: Report) -> int:
    g = _graph(a.graph, r)
    v = is_generically_rigid(g)
    r.verdict("laman_edges", [list(e) for e in v.laman_edges])
    r.verdict("rigid", v.rigid)
    _write(a.output, _dump({"edges": [list(e) for e in v.laman_edges]}))
    if not v.rigid:
        raise PropertyFalse(f"no spanning Laman subgraph: {v.dof} edge(s) short")
    return OK


def cmd_label(a, r: Report) -> int:
    g = _graph(a.graph, r)
    trace_lines: list[str] = []
    on_step: Callable | None = None
    if a.trace:
        def on_step(step):
            trace_lines.append(json.dumps(step.to_json(), sort_keys=True))
    try:
        run = label_cpt_run(g, gl_cap=r.data["settings"]["gl_cap"]["value"], on_step=on_step)
    except NotRigidError as exc:
        r.verdict("rigid", False)
        r.verdict("dof", exc.dof)
        raise PropertyFalse(str(exc)) from None
    finally:
        if a.trace:
            _write(a.trace, "".join(line + "\n" for line in trace_lines))
    l = run.labelling
    s = count_summary(l)
    r.data["counts"] = s.to_json()
    r.verdict("pointed", not l.non_pointed)
    r.verdict("steps", len(run.steps))
    _write(a.output, _dump(l.to_json()))
    if a.require_pointed and l.non_pointed:
        raise PropertyFalse(f"labelling has {len(l.non_pointed)} non-pointed vertices")
    return OK


def cmd_check_cpt(a, r: Report) -> int:
    g = _graph(a.graph, r)
    l = _labelling(g, a.labelling, r)
    problems = cpt_violations(l)
    r.verdict("cpt", not problems)
    r.verdict("violations", problems)
    if problems:
        raise PropertyFalse(problems[0])
    r.data["counts"] = validate_cpt(l).to_json()
    return OK


def cmd_check_gl(a, r: Report) -> int:
    g = _graph(a.graph, r)
    l = _labelling(g, a.labelling, r)
    problems = cpt_violations(l)
    if problems:
        raise PropertyFalse(f"not a CPT: {problems[0]}")
    cap = r.data["settings"]["gl_cap"]["value"]
    if a.method == "dual":
        res = generalized_laman_dual(l)
    elif a.method == "corners":
        ok = faces_nondegenerate(g) and three_corner_property(l)
        res = ok
    else:
        if a.method == "enumerate" and g.n > cap:
            raise InputError(f"subset enumeration refused: n={g.n} exceeds cap {cap} (use --method pebble)")
        res = generalized_laman(l, method=a.method, cap=cap)
    r.verdict("generalized_laman", bool(res))
    r.verdict("method", a.method)
    witness = getattr(res, "witness", None)
    r.verdict("witness", list(witness) if witness else None)
    r.data["counts"] = count_summary(l).to_json()
    if not res:
        raise PropertyFalse(f"generalized Laman fails{'' if not witness else f' on vertices {list(witness)}'}")
    return OK


def cmd_stretch(a, r: Report) -> int:
    g = _graph(a.graph, r)
    l = _labelling(g, a.labelling, r)
    problems = cpt_violations(l)
    if problems:
        raise PropertyFalse(f"not a CPT: {problems[0]}")
    gl = _gl_check(l, r.data["settings"]["gl_cap"]["value"])
    if not gl:
        r.verdict("generalized_laman", False)
        raise PropertyFalse("labelling is not generalized Laman, so it cannot be stretched")
    emb = stretch(l, seed=a.seed, iters=a.iters, check_precondition=False)
    rep = verify_stretch(emb, l)
    r.verdict("verified", rep.ok)
    r.data["counts"] = count_summary(l).to_json()
    _write(a.output, _dump(emb.to_json()))
    return OK


def cmd_verify(a, r: Report) -> int:
    g = _graph(a.graph, r)
    l = _labelling(g, a.labelling, r)
    emb = _coords(g, a.coords, r)
    rep = verify_stretch(emb, l)
    r.verdict("verified", rep.ok)
    r.verdict("problems", rep.problems)
    r.verdict("geometric_counts", {"e": rep.e, "x": rep.x_geo, "y": rep.y_geo})
    if not rep.ok:
        raise PropertyFalse(rep.problems[0])
    return OK


def cmd_draw(a, r: Report) -> int:
    g = _graph(a.graph, r)
    emb = _coords(g, a.coords, r)
    l = _labelling(g, a.labelling, r) if a.labelling else None
    _write(a.output, draw_svg(emb, l, version=__version__))
    r.verdict("written", bool(a.output))
    return OK


def cmd_surface_check(a, r: Report) -> int:
    data = _read_json(a.graph, r, "graph")
    try:
        sg = SurfaceGraph.from_json(data)
    except (EmbeddingError, ValueError, TypeError) as exc:
        raise InputError(f"invalid surface graph: {exc}") from None
    orientable, genus = genus_of(sg)
    r.verdict("orientable", orientable)
    r.verdict("g", genus)
    if not a.labelling:
        return OK
    ldata = _read_json(a.labelling, r, "labelling")
    try:
        sc = SurfaceCpt.from_json(sg, ldata)
        s = check_surface_cpt(sc)
    except LabellingInputError as exc:
        raise InputError(str(exc)) from None
    except SurfaceCptViolation as exc:
        r.verdict("cpt", False)
        raise PropertyFalse(str(exc)) from None
    r.verdict("cpt", True)
    r.verdict("x", s.x)
    r.verdict("y", s.y)
    r.verdict("e", s.e)
    r.verdict("identity_holds", s.identity_holds)
    print(f"orientable={s.orientable} g={s.g} x={s.x} y={s.y} e={s.e} identity={'ok' if s.identity_holds else 'FAILS'}", file=sys.stderr)
    return OK


def cmd_pipeline(a, r: Report) -> int:
    g = _graph(a.graph, r)
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    v = is_generically_rigid(g)
    r.verdict("rigid", v.rigid)
    if not v.rigid:
        raise PropertyFalse(f"not generically rigid: {v.dof} degree(s) of freedom")
    cap = r.data["settings"]["gl_cap"]["value"]
    run = label_cpt_run(g, gl_cap=cap)
    l = run.labelling
    r.data["counts"] = count_summary(l).to_json()
    r.verdict("generalized_laman", bool(_gl_check(l, cap)))
    emb = stretch(l, seed=a.seed, iters=a.iters, check_precondition=False)
    rep = verify_stretch(emb, l)
    r.verdict("verified", rep.ok)
    (out / "labelling.json").write_text(_dump(l.to_json()))
    (out / "coords.json").write_text(_dump(emb.to_json()))
    (out / "drawing.svg").write_text(draw_svg(emb, l, version=__version__))
    r.verdict("outputs", ["labelling.json", "coords.json", "drawing.svg"])
    return OK


def cmd_selftest(a, r: Report) -> int:
    from .selftest import run_selftest

    s = r.data["settings"]
    matrix = run_selftest(
        seed=a.seed,
        quick=a.quick,
        rank_tol=s["rank_tol"]["value"],
        rank_trials=s["rank_trials"]["value"],
        gl_cap=s["gl_cap"]["value"],
        search_cap=s["search_cap"]["value"],
    )
    r.verdict("matrix", matrix)
    for name, row in sorted(matrix.items()):
        print(f"{'PASS' if row['mismatches'] == 0 else 'FAIL'} {name}: {row['checked']} checked, {row['mismatches']} mismatches", file=sys.stderr)
    if any(row["mismatches"] for row in matrix.values()):
        raise InternalInvariantError("oracle disagreement", matrix)
    return OK


def cmd_gen_corpus(a, r: Report) -> int:
    from .oracle import henneberg_corpus, non_gl_corpus

    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {}
    corpora = {
        "henneberg.json": henneberg_corpus(a.n_max, a.count, a.seed),
        "augmented.json": henneberg_corpus(a.n_max, max(a.count // 2, 1), a.seed + 1, augmented=True),
        "non_gl.json": non_gl_corpus(max(a.count // 5, 20), a.seed + 2),
    }
    for name, c in corpora.items():
        c.save(out / name)
        written[name] = len(c)
    r.verdict("written", written)
    return OK


# ---------------------------------------------------------------- argparse
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pseudotri", description="Combinatorial pseudo-triangulations of plane graphs.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--iters", type=int, default=24)
        sp.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
        sp.add_argument("--report", help="also write the JSON report to this file")
        return sp

    sp = add("check-rigid", cmd_check_rigid, "generic rigidity by the pebble game")
    sp.add_argument("graph")
    sp = add("laman-sub", cmd_laman_sub, "spanning Laman subgraph")
    sp.add_argument("graph")
    sp.add_argument("-o", "--output")
    sp = add("label", cmd_label, "generalized-Laman CPT labelling of a rigid graph")
    sp.add_argument("graph")
    sp.add_argument("-o", "--output")
    sp.add_argument("--require-pointed", action="store_true")
    sp.add_argument("--trace", help="write every inductive step as JSON lines")
    sp = add("check-cpt", cmd_check_cpt, "validate a CPT labelling")
    sp.add_argument("graph")
    sp.add_argument("labelling")
    sp = add("check-gl", cmd_check_gl, "generalized Laman property")
    sp.add_argument("graph")
    sp.add_argument("labelling")
    sp.add_argument("--method", choices=["enumerate", "pebble", "dual", "corners"], default="enumerate")
    sp = add("stretch", cmd_stretch, "straight-line realization")
    sp.add_argument("graph")
    sp.add_argument("labelling")
    sp.add_argument("-o", "--output")
    sp = add("verify", cmd_verify, "check coordinates against a labelling")
    sp.add_argument("graph")
    sp.add_argument("labelling")
    sp.add_argument("coords")
    sp = add("draw", cmd_draw, "SVG drawing with BIG angles marked by arcs")
    sp.add_argument("graph")
    sp.add_argument("coords")
    sp.add_argument("--labelling")
    sp.add_argument("-o", "--output")
    sp = add("surface-check", cmd_surface_check, "genus and CPT count identity on a closed surface")
    sp.add_argument("graph")
    sp.add_argument("labelling", nargs="?")
    sp = add("pipeline", cmd_pipeline, "check, label, stretch, verify and draw")
    sp.add_argument("graph")
    sp.add_argument("--out-dir", required=True)
    sp = add("selftest", cmd_selftest, "oracle agreement matrix")
    sp.add_argument("--quick", action="store_true")
    sp = add("gen-corpus", cmd_gen_corpus, "write corpus fixture files")
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--count", type=int, default=120)
    sp.add_argument("--n-max", type=int, default=8)
    return p


def run(argv: list[str] | None = None, env=None) -> tuple[int, str]:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(env)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT, json.dumps({"command": args.command, "exit_code": INPUT, "diagnostic": str(exc)}, sort_keys=True)
    report = Report(args.command, settings, args.timings)
    random.seed(args.seed)
    diagnostic = None
    try:
        code = args.fn(args, report)
    except PropertyFalse as exc:
        code, diagnostic = FALSE, str(exc)
    except InputError as exc:
        code, diagnostic = INPUT, str(exc)
    except InvalidCpt as exc:
        code, diagnostic = FALSE, str(exc)
    except (InternalInvariantError, SurfaceInconsistency, StretchError, PreconditionError) as exc:
        code, diagnostic = INTERNAL, str(exc).splitlines()[0]
    if diagnostic:
        print(f"error: {diagnostic}", file=sys.stderr)
    text = report.finish(code, diagnostic)
    if args.report:
        _write(args.report, text + "\n")
    return code, text


def main(argv: list[str] | None = None) -> int:
    code, text = run(argv)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
