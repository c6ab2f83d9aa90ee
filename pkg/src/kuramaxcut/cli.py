"""Command-line driver: ``kuramaxcut {solve,bound,gen,compare,brute}``.

Exit codes: 0 success, 1 usage or parse error, 2 solver failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .energy import (
    AdmissibleFunction,
    InadmissibleFunctionError,
    approximation_constant,
    cosine,
    parse_function,
    rounding_ratio,
)
from .graph import (
    GraphFormatError,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    generate_erdos_renyi,
    read_graph,
    to_edge_list,
    total_weight,
)
from .optimize import SolverError, SolverParams, SolveTrace, Stage, solve_pipeline
from .rounding import sweep_all_cuts, tent
from .verify import MAX_ORACLE_VERTICES, brute_force_maxcut, verify_solution

log = logging.getLogger("kuramaxcut")

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3

DEFAULT_G = "tent:5"
DEFAULTS = {
    "g": DEFAULT_G,
    "schedule": None,
    "seed": 0,
    "restarts": 5,
    "max_iters": 5000,
    "grad_tol": 1e-6,
    "coordinate_sweeps": 200,
    "sample_points_per_degree": 16,
    "step": "auto",
    "out_dir": ".",
    "format": "json",
}
CONFIG_TYPES = {
    "graph": str, "g": str, "schedule": str, "seed": int, "restarts": int, "max_iters": int,
    "grad_tol": float, "coordinate_sweeps": int, "sample_points_per_degree": int,
    "step": str, "out_dir": str, "format": str,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# configuration


def read_config(path: str | Path) -> dict:
    """``key=value`` lines; ``#`` comments; keys as in the long CLI flags."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in CONFIG_TYPES:
            raise UsageError(f"{path}:{lineno}: bad config entry {raw!r}")
        try:
            values[key] = CONFIG_TYPES[key](value.strip())
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value.strip()!r}") from None
    return values


def resolve_options(args: argparse.Namespace) -> dict:
    """Defaults, overridden by the config file, overridden by explicit flags."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        opts.update(read_config(args.config))
    for key in CONFIG_TYPES:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    return opts


def solver_params(opts: dict) -> SolverParams:
    step = str(opts["step"])
    if step in ("auto", "lipschitz_auto"):
        rule, eta = "lipschitz_auto", 0.01
    elif step.startswith("fixed:"):
        rule, eta = "fixed", float(step[len("fixed:"):])
    else:
        raise UsageError(f"bad step rule {step!r}; use 'auto' or 'fixed:<eta>'")
    return SolverParams(
        max_iters=opts["max_iters"], grad_tol=opts["grad_tol"], step_rule=rule, eta=eta,
        restarts=opts["restarts"], seed=opts["seed"], coordinate_sweeps=opts["coordinate_sweeps"],
        sample_points_per_degree=opts["sample_points_per_degree"],
    )


def parse_schedule(text: str, params: SolverParams) -> list[Stage]:
    """``<g>@<method>;<g>@<method>...``, e.g. ``cosine@gd;tent:5@cd``."""
    stages = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        g_spec, _, method = item.rpartition("@")
        if not g_spec:
            g_spec, method = method, "gd"
        stages.append(Stage(parse_function(g_spec), method.strip(), params))
    if not stages:
        raise UsageError("schedule is empty")
    return stages


def schedule_for(g: AdmissibleFunction, params: SolverParams) -> list[Stage]:
    """Cosine gradient descent, then coordinate descent on ``g`` (just the first stage for cosine)."""
    first = Stage(cosine(), "gd", params)
    if g == cosine():
        return [first]
    return [first, Stage(g, "cd", params)]


# ---------------------------------------------------------------------------
# reporting


def _stage_summary(trace: SolveTrace) -> dict:
    return {
        "g": trace.g.spec,
        "method": trace.method,
        "iterations": trace.iterations_used,
        "termination_reason": trace.termination_reason,
        "final_energy": trace.final_energy,
        "energies": list(map(float, trace.energy_per_iteration)),
    }


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _fmt(x):
    return repr(float(x)) if isinstance(x, (float, np.floating)) else x


def write_angles_csv(path: Path, theta) -> None:
    path.write_text(_rows_csv(["vertex", "angle"], [(i, repr(float(t))) for i, t in enumerate(theta)]),
                    encoding="utf-8")


def write_cut_csv(path: Path, side) -> None:
    path.write_text(_rows_csv(["vertex", "side"], [(i, "A" if s else "B") for i, s in enumerate(side)]),
                    encoding="utf-8")


def read_angles_csv(path: str | Path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = sorted((int(r["vertex"]), float(r["angle"])) for r in csv.DictReader(fh))
    return np.array([a for _, a in rows])


def read_cut_csv(path: str | Path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = sorted((int(r["vertex"]), r["side"] == "A") for r in csv.DictReader(fh))
    return np.array([s for _, s in rows], dtype=bool)


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


# ---------------------------------------------------------------------------
# commands


def _load_graph(opts):
    if not opts.get("graph"):
        raise UsageError("--graph is required")
    return read_graph(opts["graph"])


def cmd_solve(args) -> int:
    opts = resolve_options(args)
    params = solver_params(opts)
    graph = _load_graph(opts)
    if opts["schedule"]:
        schedule = parse_schedule(opts["schedule"], params)
    else:
        schedule = schedule_for(parse_function(opts["g"]), params)
    out_dir = Path(opts["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    final_g = schedule[-1].g
    c = approximation_constant(final_g)

    report = {
        "tool": "kuramaxcut",
        "version": __version__,
        "status": "ok",
        "seed": params.seed,
        "graph": {"path": str(opts["graph"]), "n": graph.n, "num_edges": graph.num_edges,
                  "total_weight": total_weight(graph)},
        "g": final_g.spec,
        "constant": c.value,
        "constant_argmin": c.argmin,
        "schedule": [{"g": s.g.spec, "method": s.method} for s in schedule],
        "params": {"max_iters": params.max_iters, "grad_tol": params.grad_tol,
                   "step_rule": params.step_rule, "eta": params.eta, "restarts": params.restarts,
                   "coordinate_sweeps": params.coordinate_sweeps,
                   "sample_points_per_degree": params.sample_points_per_degree},
        "timings": {},
    }
    t0 = time.perf_counter()
    try:
        trace = solve_pipeline(graph, schedule, seed=params.seed, restarts=params.restarts)
    except SolverError as exc:
        report["status"] = "solver_failed"
        report["error"] = str(exc)
        report["timings"]["solve_seconds"] = time.perf_counter() - t0
        (out_dir / "report.json").write_text(_dump_json(report), encoding="utf-8")
        print(f"solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    report["timings"]["solve_seconds"] = time.perf_counter() - t0

    theta = trace.final_configuration
    t1 = time.perf_counter()
    sweep = sweep_all_cuts(graph, theta)
    report["timings"]["sweep_seconds"] = time.perf_counter() - t1
    t2 = time.perf_counter()
    verification = verify_solution(graph, final_g, theta, trace.final_energy)
    report["timings"]["verify_seconds"] = time.perf_counter() - t2

    report["best_restart"] = trace.restart
    report["stages"] = [_stage_summary(s) for s in trace.stages]
    report["final_energy"] = trace.final_energy
    report["sweep"] = {"best_cut": sweep.best.weight, "expected_cut": sweep.expected,
                       "worst_cut": sweep.worst, "breakpoints": len(sweep.breakpoints)}
    report["verification"] = verification.to_dict()
    report["final_angles"] = [float(t) for t in theta]
    report["best_cut_side"] = ["A" if s else "B" for s in sweep.best.side]

    (out_dir / "report.json").write_text(_dump_json(report), encoding="utf-8")
    write_angles_csv(out_dir / "angles.csv", theta)
    (out_dir / "sweep.csv").write_text(sweep.to_csv(), encoding="utf-8")
    write_cut_csv(out_dir / "cut.csv", sweep.best.side)

    summary = {"n": graph.n, "total_weight": total_weight(graph), "g": final_g.spec,
               "constant": c.value, "final_energy": trace.final_energy,
               "best_cut": sweep.best.weight, "expected_cut": sweep.expected,
               "maxcut_exact": verification.maxcut_exact, "out_dir": str(out_dir)}
    _emit(summary, opts["format"])

    failed = verification.theorem_ok is False or verification.details.get("ratio_ok") is False
    if failed:
        print("verification failed: rounding guarantee violated", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _emit(record: dict, fmt: str) -> None:
    if fmt == "csv":
        sys.stdout.write(_rows_csv(list(record), [[_fmt(v) for v in record.values()]]))
    else:
        sys.stdout.write(_dump_json(record))


def cmd_bound(args) -> int:
    opts = resolve_options(args)
    g = parse_function(opts["g"])
    c = approximation_constant(g)
    record = {"g": g.spec, "constant": c.value, "argmin": c.argmin}
    if args.curve:
        x = np.linspace(0.0, math.pi, args.curve_points)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = rounding_ratio(g, x)
        rows = [(repr(float(a)), repr(float(b)), repr(float(t)), repr(float(r)))
                for a, b, t, r in zip(x, g(x), tent(x), ratio)]
        Path(args.curve).write_text(_rows_csv(["x", "g", "tent", "ratio"], rows), encoding="utf-8")
        record["curve"] = args.curve
    _emit(record, opts["format"])
    return EXIT_OK


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "erdos_renyi":
        if args.n is None or args.p is None:
            raise UsageError("erdos_renyi needs --n and --p")
        graph = generate_erdos_renyi(args.n, args.p, args.seed if args.seed is not None else 0)
    elif kind == "cycle":
        graph = cycle_graph(_need(args.n, "--n"))
    elif kind == "complete":
        graph = complete_graph(_need(args.n, "--n"))
    elif kind == "complete_bipartite":
        graph = complete_bipartite_graph(_need(args.a, "--a"), _need(args.b, "--b"))
    else:
        raise UsageError(f"unknown generator {kind!r}")
    text = to_edge_list(graph)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this generator")
    return value


def cmd_compare(args) -> int:
    opts = resolve_options(args)
    params = solver_params(opts)
    graph = _load_graph(opts)
    specs = args.g_list or ["cosine", DEFAULT_G]
    oracle = brute_force_maxcut(graph) if graph.n <= MAX_ORACLE_VERTICES else None
    header = ["g", "constant", "best_cut", "expected_cut", "final_energy", "iterations"]
    if oracle is not None:
        header.append("maxcut_exact")
    rows = []
    for spec in specs:
        g = parse_function(spec)
        try:
            trace = solve_pipeline(graph, schedule_for(g, params), seed=params.seed,
                                   restarts=params.restarts)
        except SolverError as exc:
            print(f"solver failed for {spec}: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        sweep = sweep_all_cuts(graph, trace.final_configuration)
        row = [g.spec, approximation_constant(g).value, sweep.best.weight, sweep.expected,
               trace.final_energy, sum(s.iterations_used for s in trace.stages)]
        if oracle is not None:
            row.append(oracle[0])
        rows.append(row)
    text = _rows_csv(header, [[_fmt(v) for v in r] for r in rows])
    if opts["format"] == "json":
        sys.stdout.write(_dump_json([dict(zip(header, r)) for r in rows]))
    else:
        sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_brute(args) -> int:
    opts = resolve_options(args)
    graph = _load_graph(opts)
    if graph.n > MAX_ORACLE_VERTICES:
        raise UsageError(f"brute force limited to n <= {MAX_ORACLE_VERTICES}, graph has n = {graph.n}")
    value, cut = brute_force_maxcut(graph)
    if opts["format"] == "csv":
        sys.stdout.write(f"# maxcut={value!r}\n")
        sys.stdout.write(_rows_csv(["vertex", "side"], [(i, "A" if s else "B") for i, s in enumerate(cut.side)]))
    else:
        sys.stdout.write(_dump_json({"maxcut": value, "side": ["A" if s else "B" for s in cut.side]}))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _shared(p: argparse.ArgumentParser, graph=True, solver=True):
    if graph:
        p.add_argument("--graph", help="edge-list or DIMACS graph file")
    p.add_argument("--config", help="key=value config file; explicit flags take precedence")
    p.add_argument("--format", choices=["json", "csv"], default=None, help="stdout format")
    if solver:
        p.add_argument("--schedule", help="stages as '<g>@<gd|cd>;...', e.g. 'cosine@gd;tent:5@cd'")
        p.add_argument("--seed", type=int)
        p.add_argument("--restarts", type=int)
        p.add_argument("--max-iters", dest="max_iters", type=int)
        p.add_argument("--grad-tol", dest="grad_tol", type=float)
        p.add_argument("--coordinate-sweeps", dest="coordinate_sweeps", type=int)
        p.add_argument("--sample-points-per-degree", dest="sample_points_per_degree", type=int)
        p.add_argument("--step", help="'auto' (1/L) or 'fixed:<eta>'")
        p.add_argument("--out-dir", dest="out_dir")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kuramaxcut", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="minimize the energy, round, verify, write reports")
    _shared(p)
    p.add_argument("--g", help="final-stage coupling: cosine | tent:<m> | custom:<k:c,...>")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bound", help="rounding constant c(g)")
    _shared(p, graph=False, solver=False)
    p.add_argument("--g", help="cosine | tent:<m> | custom:<k:c,...>")
    p.add_argument("--curve", help="write x, g, tent, ratio CSV here")
    p.add_argument("--curve-points", type=int, default=1001)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("gen", help="write a generated graph as an edge list")
    p.add_argument("kind", choices=["erdos_renyi", "cycle", "complete", "complete_bipartite"])
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compare", help="table of results for several coupling functions")
    _shared(p)
    p.add_argument("--g", dest="g_list", action="append", help="repeatable coupling spec")
    p.add_argument("--out", help="also write the CSV table here")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("brute", help="exact Max-Cut by enumeration (n <= 26)")
    _shared(p, solver=False)
    p.set_defaults(func=cmd_brute)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, GraphFormatError, InadmissibleFunctionError, ValueError, OSError) as exc:
        print(f"kuramaxcut: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
