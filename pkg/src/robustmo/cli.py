"""Command-line front end: solve | bench | verify | list.

Exit codes: 0 success, 2 usage error, 3 capacity error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .bench import run_campaign, start_point, worker_count
from .errors import CapacityError, RobustmoError
from .oracle import GridSpec, certify_robust_weak_efficiency
from .problems import load_problem_file, registry_get, registry_names
from .setops import check_regularity
from .solver import (STATUS_MAX_ITERS, STATUS_STATIONARY, SolveConfig,
                     SolveTrace, solve)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_NUMERICAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustmo",
        description="Quasi-Newton solver for uncertain multiobjective problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, with_problem=True):
        if with_problem:
            sp.add_argument("problem", nargs="?", help="registered problem name")
            sp.add_argument("--problem-file", help="JSON problem file")
        sp.add_argument("--gamma", type=float, default=0.1)
        sp.add_argument("--tol", type=float, default=1e-4,
                        help="stopping tolerance on the direction norm")
        sp.add_argument("--subproblem-tol", type=float, default=1e-8)
        sp.add_argument("--max-iters", type=int, default=1000)
        sp.add_argument("--hessian-init", choices=["identity", "fd"],
                        default="identity")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=".", help="output directory")

    sp = sub.add_parser("solve", help="run one solve and dump its trace")
    add_common(sp)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--x0", help="comma-separated starting point")
    group.add_argument("--random", action="store_true",
                       help="sample the starting point from the problem box")

    sp = sub.add_parser("bench", help="random-start campaign with statistics")
    add_common(sp)
    sp.add_argument("--starts", type=int, default=100)

    sp = sub.add_parser("verify", help="grid certification of a terminal point")
    add_common(sp)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--x0", help="comma-separated point to certify")
    group.add_argument("--trace", help="trace.json whose final point to certify")
    sp.add_argument("--grid-step", type=float, default=1e-3)
    sp.add_argument("--reg-radius", type=float, default=1e-2)
    sp.add_argument("--reg-samples", type=int, default=32)

    sub.add_parser("list", help="print the problem catalog")
    return parser


def _load_problem(args):
    if getattr(args, "problem_file", None):
        return load_problem_file(args.problem_file)
    if not getattr(args, "problem", None):
        print("error: a problem name or --problem-file is required",
              file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    try:
        return registry_get(args.problem)
    except LookupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _config(args) -> SolveConfig:
    return SolveConfig(
        gamma=args.gamma,
        p_norm_tol=args.tol,
        max_iters=args.max_iters,
        subproblem_tol=args.subproblem_tol,
        hessian_init="exact_hessian_fd" if args.hessian_init == "fd"
        else "identity",
        seed=args.seed,
    )


def _parse_x0(text: str, n: int) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        print(f"error: malformed point {text!r}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    if len(vals) != n:
        print(f"error: point has {len(vals)} coordinates, expected {n}",
              file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    return np.asarray(vals)


def _fu_points_csv(problem, trace: SolveTrace) -> str:
    """Image of every iterate, one row per (iterate, scenario), colored
    black (start) / blue (intermediate) / red (final)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["k", "scenario", "role"] + [f"f{l + 1}" for l in range(problem.m)])
    points = [np.asarray(r.x) for r in trace.iterations]
    if not points or tuple(points[-1].tolist()) != trace.x_final:
        points.append(np.asarray(trace.x_final))
    last = len(points) - 1
    for k, x in enumerate(points):
        role = "black" if k == 0 else ("red" if k == last else "blue")
        values = problem.evaluate_image(x)
        for i in range(problem.p):
            writer.writerow([k, i, role] + [repr(v) for v in values[i]])
    return buf.getvalue()


def cmd_solve(args) -> int:
    problem = _load_problem(args)
    config = _config(args)
    if args.x0:
        x0 = _parse_x0(args.x0, problem.n)
    else:
        x0 = start_point(problem, args.seed, 0)
    trace = solve(problem, x0, config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trace.json").write_text(
        json.dumps(trace.to_json(), indent=2, sort_keys=True) + "\n")
    (out / "trace.csv").write_text(trace.to_csv())
    try:
        (out / "fu_points.csv").write_text(_fu_points_csv(problem, trace))
    except RobustmoError:
        pass  # image not evaluable at the terminal point of a failed run

    print(f"problem={problem.name} status={trace.status} "
          f"iterations={trace.n_steps} p_norm={trace.p_norm_final:.6g} "
          f"merit={trace.merit_final:.6g}")
    if trace.status in (STATUS_STATIONARY, STATUS_MAX_ITERS):
        return EXIT_OK
    print(f"error: solve ended with status {trace.status}"
          + (f": {trace.error}" if trace.error else ""), file=sys.stderr)
    return EXIT_NUMERICAL


def cmd_bench(args) -> int:
    problem = _load_problem(args)
    if args.starts < 1:
        print("error: --starts must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    config = _config(args)
    result = run_campaign(problem, args.starts, args.seed, config,
                          threads=worker_count())

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "runs.csv").write_text(result.runs_csv())
    (out / "stats.json").write_text(result.stats_json(config))
    (out / "times.json").write_text(result.times_json())

    print(f"problem={problem.name} starts={args.starts} seed={args.seed} "
          f"errors={result.errors}")
    if result.iteration_stats is None:
        print("error: all runs failed", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"iterations: {result.iteration_stats.formatted()}")
    print(f"time_s:     {result.time_stats.formatted()}")
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = _load_problem(args)
    if args.trace:
        payload = json.loads(Path(args.trace).read_text())
        x_bar = np.asarray(payload["x_final"], dtype=float)
    else:
        x_bar = _parse_x0(args.x0, problem.n)

    if problem.box is not None:
        lb, ub = problem.box
    else:
        lb, ub = x_bar - 1.0, x_bar + 1.0
    grid = GridSpec(lb=lb, ub=ub, step=args.grid_step)
    report = certify_robust_weak_efficiency(problem, x_bar, grid)
    regularity = check_regularity(problem, x_bar, radius=args.reg_radius,
                                  samples=args.reg_samples, seed=args.seed)
    payload = {
        "problem": problem.name,
        "certification": report.to_json(),
        "regularity": regularity.to_json(),
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_list() -> int:
    print(f"{'name':6} {'(m,n,r)':>10} {'scenarios':>9}  source")
    for name in registry_names():
        prob = registry_get(name)
        dims = f"({prob.m},{prob.n},{prob.r})"
        print(f"{name:6} {dims:>10} {prob.p:>9}  {prob.source}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "list":
            return cmd_list()
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RobustmoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
