"""Command-line front end.

Subcommands: subdivide, sample-beta, simulate, restrict, flow, bounds,
verify, report.  Every stochastic subcommand requires --seed and all runs
are reproducible: identical (arguments, seed) produce byte-identical
outputs.  Output goes to --out or stdout; --format selects csv or json
where both make sense.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import betafield, flow, jumps, processes, verify
from .graphs import Graph, build_subdivision


def _read_graph(path: str) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return Graph.from_json(fh.read())


def _write_out(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def cmd_subdivide(args) -> int:
    g = _read_graph(args.graph)
    sg = build_subdivision(g, args.r)
    _write_out(sg.to_json() + "\n", args.out)
    return 0


def cmd_sample_beta(args) -> int:
    g = _read_graph(args.graph)
    rng = np.random.default_rng(args.seed)
    betas = betafield.sample_beta_batch(g.weight_matrix(), args.samples, rng)
    if args.format == "json":
        text = json.dumps({"schema": 1, "vertices": list(map(str, g.vertices)),
                           "beta": betas.tolist()}) + "\n"
    else:
        text = _csv_text([str(v) for v in g.vertices], betas.tolist())
    _write_out(text, args.out)
    return 0


def cmd_simulate(args) -> int:
    g = _read_graph(args.graph)
    rng = np.random.default_rng(args.seed)
    rho = g.vertices[0] if args.rho is None else _match_vertex(g, args.rho)
    rows = []
    for pid in range(args.paths):
        if args.model == "vrjp":
            path = processes.simulate_vrjp_direct(
                g.weight_matrix(), g.index(rho), args.steps, rng,
                vertices=g.vertices)
            states, waits = path.states, path.waits
        elif args.model == "mjp":
            params = jumps.MJPParams(g.weight_matrix(), np.ones(g.n),
                                     g.vertices)
            path = jumps.simulate_mjp(params, rho, args.steps, rng)
            states, waits = path.states, path.waits
        else:
            states = processes.simulate_errw(g, args.a, rho, args.steps, rng)
            waits = []
        for step, v in enumerate(states):
            wait = waits[step] if step < len(waits) else None
            rows.append([pid, step, v, wait])
    if args.format == "json":
        text = json.dumps({"schema": 1, "columns": ["path", "step", "vertex",
                                                    "wait"],
                           "rows": [[r[0], r[1], str(r[2]),
                                     None if r[3] is None else float(r[3])]
                                    for r in rows]}) + "\n"
    else:
        text = _csv_text(["path", "step", "vertex", "wait"], rows)
    _write_out(text, args.out)
    return 0


def _match_vertex(g: Graph, token: str):
    for v in g.vertices:
        if str(v) == token:
            return v
    raise SystemExit(f"vertex {token!r} not in graph")


def cmd_restrict(args) -> int:
    with open(args.paths, "r", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        by_path: dict = {}
        for row in reader:
            by_path.setdefault(int(row["path"]), []).append(row)
    subset = set(args.subset.split(","))
    rows = []
    for pid in sorted(by_path):
        entries = by_path[pid]
        states = tuple(r["vertex"] for r in entries)
        waits = [float(r["wait"]) for r in entries if r["wait"]]
        path = jumps.JumpPath(states, np.asarray(waits))
        path = jumps.restrict_path(path, subset)
        if args.drop_loops:
            path = jumps.remove_self_loops(path)
        for step, v in enumerate(path.states):
            wait = path.waits[step] if step < len(path.waits) else None
            rows.append([pid, step, v, wait])
    _write_out(_csv_text(["path", "step", "vertex", "wait"], rows), args.out)
    return 0


def _parse_dist(spec: str):
    kind, _, rest = spec.partition(":")
    opts = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            opts[key] = float(val)
    if kind == "gamma":
        a = opts.get("a", 1.0)
        return lambda rng, shape: rng.gamma(a, size=shape), \
            lambda alpha: math.gamma(a + alpha) / math.gamma(a), \
            _digamma(a)
    if kind == "fixed":
        w = opts.get("w", 1.0)
        return w, lambda alpha: w ** alpha, math.log(w)
    raise SystemExit(f"unknown weight distribution {spec!r}")


def _digamma(a: float) -> float:
    from scipy.special import digamma

    return float(digamma(a))


def cmd_flow(args) -> int:
    g = _read_graph(args.graph)
    rng = np.random.default_rng(args.seed)
    weights, moment_fn, log_moment = _parse_dist(args.dist)
    alphas = [float(t) for t in args.alpha.split(",")]
    rows = flow.verify_bounds(g, args.r, args.l, alphas, args.samples, rng,
                              weights, moment_fn, log_moment)
    header = ["level", "alpha", "mc_moment", "mc_se", "bound_phase1",
              "bound_combined", "bound_log", "m0", "m1"]
    table = [[row[k] for k in header] for row in rows]
    if args.format == "json":
        text = json.dumps({"schema": 1, "columns": header,
                           "rows": table}) + "\n"
    else:
        text = _csv_text(header, table)
    _write_out(text, args.out)
    return 0


def cmd_bounds(args) -> int:
    rep = flow.moment_bound(args.alpha, args.r, args.l,
                            moment_alpha=args.moment,
                            log_moment_in=args.log_moment)
    payload = {
        "schema": 1, "alpha": args.alpha, "r": args.r, "l": args.l,
        "phase1": rep.phase1,
        "combined_alpha": rep.combined_alpha, "m0": rep.m0,
        "combined_log": rep.combined_log, "m1": rep.m1,
    }
    if args.c3 is not None:
        holds, required = flow.recurrence_threshold(
            args.degree, args.alpha, args.c3, args.moment, args.r, args.l)
        payload["recurrence_hypothesis_holds"] = holds
        payload["required_gap"] = required
    _write_out(json.dumps(payload) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    if args.suite not in verify.SUITES:
        return 2
    verdicts = verify.run_suite(args.suite, args.seed, quick=args.quick)
    ok = all(v.passed for v in verdicts)
    payload = {
        "schema": 1, "suite": args.suite, "seed": args.seed,
        "passed": bool(ok),
        "verdicts": [{"name": v.name, "statistic": float(v.statistic),
                      "threshold": float(v.threshold),
                      "passed": bool(v.passed),
                      "n": int(v.n), "notes": v.notes} for v in verdicts],
    }
    _write_out(json.dumps(payload, indent=2) + "\n", args.out)
    for v in verdicts:
        status = "PASS" if v.passed else "FAIL"
        sys.stderr.write(f"{status} {v.name}: stat={v.statistic:.6g} "
                         f"thr={v.threshold:.6g} ({v.notes})\n")
    return 0 if ok else 1


def cmd_report(args) -> int:
    with open(args.moments, "r", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    lines = ["| level | alpha | mc_moment | mc_se | bound | violation |",
             "|---|---|---|---|---|---|"]
    violations = 0
    for row in rows:
        bounds = [float(row[k]) for k in ("bound_phase1", "bound_combined",
                                          "bound_log") if row.get(k)]
        bound = min(bounds) if bounds else float("inf")
        mc = float(row["mc_moment"])
        se = float(row["mc_se"])
        bad = not flow.moment_within_bound(mc, se, bound)
        violations += bad
        lines.append(f"| {row['level']} | {row['alpha']} | {mc!r} | {se!r} "
                     f"| {bound!r} | {'YES' if bad else ''} |")
    _write_out("\n".join(lines) + "\n", args.out)
    return 1 if violations else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vrjp",
        description="Reinforced jump processes: simulation and verification")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("subdivide", help="emit the 2^r subdivision of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for "
                   "interface uniformity")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("sample-beta", help="draw beta fields, one row each")
    p.add_argument("--graph", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_sample_beta)

    p = sub.add_parser("simulate", help="simulate vrjp, errw, or mjp paths")
    p.add_argument("--model", choices=["vrjp", "errw", "mjp"], required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--paths", type=int, default=1)
    p.add_argument("--rho", help="start vertex (default: first)")
    p.add_argument("--a", type=float, default=1.0,
                   help="initial edge weight for errw")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("restrict", help="restrict simulated paths to a subset")
    p.add_argument("--paths", required=True, help="CSV from `simulate`")
    p.add_argument("--subset", required=True, help="comma-separated vertices")
    p.add_argument("--drop-loops", action="store_true")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for "
                   "interface uniformity")
    p.add_argument("--format", choices=["csv"], default="csv")
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("flow", help="renormalization flow moments vs bounds")
    p.add_argument("--graph", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--alpha", default="0.25", help="comma-separated values")
    p.add_argument("--dist", default="gamma:a=1",
                   help="gamma:a=A or fixed:w=W")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("bounds", help="evaluate the decay bounds and minimizers")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--moment", type=float, required=True,
                   help="E[W^alpha] of the input weights")
    p.add_argument("--log-moment", type=float, default=None,
                   help="E[log W] of the input weights")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--c3", type=float, default=None,
                   help="external recurrence constant c3(d, alpha)")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for "
                   "interface uniformity")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("--suite", required=True,
                   help=f"one of {sorted(verify.SUITES)}")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--quick", action="store_true",
                   help="reduced sample sizes")
    p.add_argument("--out")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="markdown table from a flow moments CSV")
    p.add_argument("--moments", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for "
                   "interface uniformity")
    p.add_argument("--format", choices=["md"], default="md")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and args.suite not in verify.SUITES:
        parser.error(f"unknown suite {args.suite!r}; "
                     f"choose from {sorted(verify.SUITES)}")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
