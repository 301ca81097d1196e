"""Command-line front end: generate graphs, query resistances, audit identities.

Subcommands:

  generate   build a named family and write/print its graph JSON
  resist     effective resistance between two vertices, any or all methods
  check      run the identity suite on a graph file (inversion, axioms, ...)
  walk       absorbed-walk sampling vs. exact harmonic measure
  oracle     closed-form reference values, optionally cross-checked

Every report embeds the invoking configuration and seed; numbers are rounded
to 12 significant digits.  Exit codes: 0 success, 1 usage, 2 validation
failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from datetime import datetime, timezone

import numpy as np

from .decomposition import energy_split, royden_split
from .energy import SolverError, energy_inner, gauged, pointwise_product, solve_dipole
from .graphs import FAMILIES, GraphError, generate, load_graph, validate
from .greens import (
    binomial_closed_form,
    chain_walk_diagonal,
    generating_function_check,
    greens_gram,
    greens_inversion_check,
    nary_tree_closed_forms,
    nary_tree_comparison,
)
from .markov import (
    estimate_from_samples,
    harmonic_measure_exact,
    measure_z_scores,
    sample_paths,
)
from .resistance import continuum_reference, resistance, resistance_matrix

__all__ = ["main"]


class UsageError(Exception):
    """Bad flag combinations caught after parsing."""


# -- plumbing ------------------------------------------------------------------


def _apply_threads(n):
    n = max(1, int(n))
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(n))
    try:  # effective even after the BLAS pools are up
        import threadpoolctl

        threadpoolctl.threadpool_limits(n)
    except Exception:
        pass
    return n


def _round12(obj):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else repr(obj)
    if isinstance(obj, np.floating):
        return _round12(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _round12(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _config_echo(args):
    skip = {"handler", "command"}
    config = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        config[key] = value if isinstance(value, (bool, int, float, str)) else str(value)
    return config


def _report(args, payload):
    report = {"command": args.command, "config": _config_echo(args), "seed": args.seed}
    if not args.deterministic:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    report.update(payload)
    return _round12(report)


def _csv_text(report):
    rows = []

    def descend(prefix, obj):
        if isinstance(obj, dict):
            for k in sorted(obj):
                descend(f"{prefix}.{k}" if prefix else str(k), obj[k])
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                descend(f"{prefix}[{i}]", v)
        else:
            rows.append((prefix, obj))

    descend("", report)
    return "\n".join(["key,value"] + [f"{k},{v}" for k, v in rows]) + "\n"


def _emit(args, report):
    if args.format == "csv":
        text = _csv_text(report)
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if getattr(args, "report_file", None):
        with open(args.report_file, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _parse_vertex(graph, text):
    s = text.strip().strip("()")
    if re.fullmatch(r"-?\d+", s):
        label = int(s)
    elif re.fullmatch(r"-?\d+(\s*,\s*-?\d+)+", s):
        label = tuple(int(p) for p in s.split(","))
    else:
        label = text
    return graph.index_of(label)


# -- subcommands ---------------------------------------------------------------

_PARAM_FLAGS = (
    "growth",
    "d",
    "b_plus",
    "b_minus",
    "branching",
    "b",
    "level_sizes",
    "level_weights",
    "width",
    "r1",
    "r2",
    "r3",
)


def cmd_generate(args):
    params = {}
    for name in _PARAM_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    trunc = generate(args.family, radius=args.radius, **params)
    graph = trunc.graph
    payload = {
        "family": args.family,
        "vertices": graph.n,
        "edges": graph.num_edges,
        "interior": len(trunc.interior),
        "frontier": len(trunc.frontier),
    }
    if args.output:
        trunc.write_json(args.output)
        payload["written_to"] = args.output
    else:
        payload["graph"] = trunc.to_data()
    return payload, 0


def _load_validated(path):
    trunc = load_graph(path)
    report = validate(trunc.graph)
    if not report.ok:
        raise GraphError(f"graph failed validation:\n{report}", report)
    return trunc


def cmd_resist(args):
    trunc = _load_validated(args.graph)
    graph = trunc.graph
    if args.from_ is None or args.to is None:
        if not args.matrix:
            raise UsageError("resist needs --from and --to (or --matrix)")
        payload = {}
    else:
        x = _parse_vertex(graph, args.from_)
        y = _parse_vertex(graph, args.to)
        if args.method == "all":
            values = resistance(graph, x, y, method="all", tol=args.tol)
            disagreement = values.pop("max_rel_disagreement")
            payload = {
                "from": str(graph.labels[x]),
                "to": str(graph.labels[y]),
                "values": values,
                "max_rel_disagreement": disagreement,
            }
        else:
            value = resistance(graph, x, y, method=args.method, tol=args.tol)
            payload = {
                "from": str(graph.labels[x]),
                "to": str(graph.labels[y]),
                "values": {args.method: value},
            }
    if args.matrix:
        method = "M2" if args.method == "all" else args.method
        rm = resistance_matrix(graph, method=method, tol=args.tol)
        rm.to_csv(args.matrix)
        payload["matrix_path"] = args.matrix
        payload["matrix_method"] = method
        payload["matrix_symmetry_residual"] = rm.sym_residual
    return payload, 0


def cmd_check(args):
    trunc = _load_validated(args.graph)
    graph = trunc.graph
    rng = np.random.default_rng(args.seed)
    checks = []

    def record(name, metric, threshold, passed):
        checks.append(
            {"name": name, "metric": metric, "threshold": threshold, "passed": bool(passed)}
        )

    kernel = greens_gram(trunc, tol=args.tol)
    inv = greens_inversion_check(trunc, kernel)
    record("greens-inversion", inv, 1e-8, inv <= 1e-8)

    rm = resistance_matrix(graph, method="M2", tol=args.tol)
    slack = rm.triangle_slack() if graph.n >= 3 else 0.0
    diag = float(np.max(np.abs(np.diag(rm.matrix))))
    record("metric-triangle", slack, -1e-8, slack >= -1e-8)
    record("metric-zero-diagonal", diag, 0.0, diag == 0.0)

    worst = -np.inf
    for _ in range(200):
        u = gauged(graph, rng.standard_normal(graph.n))
        w = gauged(graph, rng.standard_normal(graph.n))
        _, cert = pointwise_product(u, w)
        scale = max(1.0, abs(cert.bound))
        worst = max(worst, (cert.product_energy - cert.bound) / scale)
    record("energy-algebra-bound", worst, 1e-9, worst <= 1e-9)

    worst = 0.0
    for _ in range(25):
        x, y = rng.choice(graph.n, size=2, replace=False)
        v = solve_dipole(graph, int(x), int(y), tol=args.tol)
        f = gauged(graph, rng.standard_normal(graph.n))
        gap = abs(energy_inner(v, f) - (f.values[x] - f.values[y]))
        worst = max(worst, gap / max(1.0, f.sup_norm()))
    record("reproducing-property", worst, 1e-8, worst <= 1e-8)

    worst = 0.0
    for _ in range(10):
        f = gauged(graph, rng.standard_normal(graph.n))
        split = energy_split(trunc, f)
        worst = max(
            worst, split["identity_residual"] / max(1.0, split["total"])
        )
    record("royden-pythagoras", worst, 1e-8, worst <= 1e-8)

    ok = all(c["passed"] for c in checks)
    payload = {"checks": checks, "all_passed": ok}
    return payload, 0 if ok else 3


def cmd_walk(args):
    trunc = _load_validated(args.graph)
    graph = trunc.graph
    if len(trunc.frontier) == 0:
        raise GraphError("graph file carries no frontier; nothing absorbs the walk")
    start = graph.base_point if args.start is None else _parse_vertex(graph, args.start)
    max_steps = args.max_steps if args.max_steps is not None else 100 * graph.n
    samples = sample_paths(trunc, start, args.samples, max_steps, args.seed)
    sampled = estimate_from_samples(trunc, samples)
    exact = harmonic_measure_exact(trunc, start)
    z = measure_z_scores(sampled, exact)
    table = [
        {
            "label": str(graph.labels[int(b)]),
            "count": int(c),
            "sampled": float(p),
            "exact": float(mu),
            "z": float(zz),
        }
        for b, c, p, mu, zz in zip(
            sampled.frontier, sampled.counts, sampled.weights, exact.weights, z
        )
    ]
    finite = [abs(row["z"]) for row in table if math.isfinite(row["z"])]
    payload = {
        "start": str(graph.labels[start]),
        "total_samples": sampled.total_samples,
        "unabsorbed": sampled.unabsorbed,
        "frontier": table,
        "max_abs_z": max(finite) if finite else 0.0,
    }
    return payload, 0


def cmd_oracle(args):
    if args.model == "binomial":
        if args.p_plus is None:
            raise UsageError("oracle --model binomial needs --p-plus")
        walk = binomial_closed_form(args.p_plus)
        payload = {
            "model": "binomial",
            "p_plus": walk.p_plus,
            "lam": walk.lam,
            "diagonal_green": walk.diagonal,
        }
        if args.verify:
            payload["generating_function"] = generating_function_check(walk.lam)
            payload["chain_cross_check"] = chain_walk_diagonal(
                args.p_plus, width=args.width or 40
            )
        return payload, 0
    if args.model == "nary":
        if args.branching is None or args.b is None:
            raise UsageError("oracle --model nary needs --n and --b")
        closed = nary_tree_closed_forms(args.branching, args.b, args.level)
        payload = {"model": "nary", "branching": args.branching, "b": args.b}
        payload.update(closed)
        if args.verify:
            payload["tree_cross_check"] = nary_tree_comparison(
                args.branching, args.b, radius=args.radius or 6, level=args.level
            )
        return payload, 0
    if args.model == "continuum":
        if args.x is None or args.y is None:
            raise UsageError("oracle --model continuum needs --x and --y")
        kernel, distance = continuum_reference(args.x, args.y)
        return {"model": "continuum", "kernel": kernel, "distance": distance}, 0
    raise UsageError(f"unknown oracle model {args.model!r}")


# -- parser --------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _int_list(text):
    return [int(p) for p in text.split(",") if p.strip()]


def _float_list(text):
    return [float(p) for p in text.split(",") if p.strip()]


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed, echoed in reports")
    common.add_argument("--tol", type=float, default=1e-10, help="solver tolerance")
    common.add_argument(
        "--deterministic",
        action="store_true",
        help="omit the timestamp so identical runs emit identical bytes",
    )
    common.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("RESNET_THREADS", "1")),
        help="cap on worker threads (env RESNET_THREADS is the fallback)",
    )
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", help="report format"
    )
    common.add_argument(
        "--report-file", default=None, help="also write the report to this path"
    )

    parser = _Parser(prog="resnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    families = sorted(set(FAMILIES) - {"explicit"})
    p = sub.add_parser("generate", parents=[common], help="build a named graph family")
    p.add_argument("--family", required=True, choices=families)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--growth", type=float, default=None)
    p.add_argument("--d", type=int, default=None, help="lattice dimension")
    p.add_argument("--b-plus", dest="b_plus", type=float, default=None)
    p.add_argument("--b-minus", dest="b_minus", type=float, default=None)
    p.add_argument(
        "--n", "--branching", dest="branching", type=int, default=None,
        help="tree branching factor",
    )
    p.add_argument("--b", type=float, default=None, help="tree growth base")
    p.add_argument("--level-sizes", dest="level_sizes", type=_int_list, default=None)
    p.add_argument("--level-weights", dest="level_weights", type=_float_list, default=None)
    p.add_argument("--width", type=int, default=None, help="chain width")
    p.add_argument("--r1", type=float, default=None)
    p.add_argument("--r2", type=float, default=None)
    p.add_argument("--r3", type=float, default=None)
    p.add_argument("-o", "--output", default=None, help="graph JSON destination")
    p.set_defaults(handler=cmd_generate, command="generate")

    p = sub.add_parser("resist", parents=[common], help="effective resistance queries")
    p.add_argument("graph", help="graph JSON file")
    p.add_argument("--from", dest="from_", default=None, help="source vertex label")
    p.add_argument("--to", default=None, help="target vertex label")
    p.add_argument(
        "--method",
        default="all",
        choices=("all", "M1", "M2", "M3", "M4", "M5", "M6", "M7"),
    )
    p.add_argument("--matrix", default=None, help="write the full matrix CSV here")
    p.set_defaults(handler=cmd_resist, command="resist")

    p = sub.add_parser("check", parents=[common], help="identity suite on a graph file")
    p.add_argument("graph", help="graph JSON file")
    p.set_defaults(handler=cmd_check, command="check")

    p = sub.add_parser("walk", parents=[common], help="absorbed-walk sampling report")
    p.add_argument("graph", help="graph JSON file (must carry a frontier)")
    p.add_argument("--start", default=None, help="start vertex label (default: base)")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--max-steps", dest="max_steps", type=int, default=None)
    p.set_defaults(handler=cmd_walk, command="walk")

    p = sub.add_parser("oracle", parents=[common], help="closed-form reference values")
    p.add_argument("--model", required=True, choices=("binomial", "nary", "continuum"))
    p.add_argument("--p-plus", dest="p_plus", type=float, default=None)
    p.add_argument("--n", "--branching", dest="branching", type=int, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--radius", type=int, default=None, help="verification tree depth")
    p.add_argument("--width", type=int, default=None, help="verification chain width")
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--y", type=float, default=None)
    p.add_argument("--verify", action="store_true", help="numerical cross-checks")
    p.set_defaults(handler=cmd_oracle, command="oracle")

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    if getattr(args, "handler", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    _apply_threads(args.threads)
    try:
        payload, code = args.handler(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except GraphError as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return 2
    except SolverError as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        return 3
    _emit(args, _report(args, payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
