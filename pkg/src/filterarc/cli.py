"""Command-line front end: ``solve``, ``bench``, ``profile`` and ``list``."""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, SolverConfig
from .driver import CONVERGED, solve
from .testlib import PAPER_SUITE, UnknownProblemError, get_problem, problem_names

__all__ = ["main", "BENCH_HEADER", "bench_records", "write_bench_csv", "read_bench_csv", "performance_profile"]

BENCH_HEADER = ("problem", "n", "m", "status", "nit", "nf", "nc", "ng", "res", "time_s")
METRICS = ("nit", "nf", "nc", "ng")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # raise instead of exiting so that main() owns the exit code
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _build_parser():
    parser = _Parser(prog="filterarc", description="Line-search filter ARC solver for equality-constrained problems.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("solve", help="solve one built-in problem")
    p.add_argument("--problem", required=True)
    p.add_argument("--tol", type=float, default=None, help="stopping tolerance on Res (default 1e-6)")
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--sigma0", type=float, default=None)
    p.add_argument("--hessian", choices=("exact", "fd", "bfgs"), default=None)
    p.add_argument("--verbose", action="store_true", help="iteration log on stderr")
    p.add_argument("--json", action="store_true", help="print the full report as JSON")

    p = sub.add_parser("bench", help="solve a suite and write one CSV row per problem")
    p.add_argument("--suite", choices=("paper", "all"), required=True)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--parallel", type=int, default=1)

    p = sub.add_parser("profile", help="performance profiles from bench CSV files")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--metric", choices=METRICS, required=True)
    p.add_argument("--out", required=True)

    sub.add_parser("list", help="list built-in problems")
    return parser


def _config_from_args(args):
    changes = {}
    if args.tol is not None:
        changes["epsilon"] = args.tol
    if args.max_iter is not None:
        changes["max_iter"] = args.max_iter
    if args.sigma0 is not None:
        changes["sigma0"] = args.sigma0
        changes["sigma_min"] = min(SolverConfig.sigma_min, args.sigma0)
    if args.hessian is not None:
        changes["hessian_strategy"] = args.hessian
    return SolverConfig(**changes)


def _print_history(report, stream):
    print(f"{'k':>4} {'type':>11} {'alpha':>9} {'sigma':>9} {'h':>10} {'l':>12} {'res':>10} trials", file=stream)
    for rec in report.history:
        alpha = "-" if rec.alpha is None else f"{rec.alpha:.2e}"
        print(
            f"{rec.k:>4} {rec.step_type or '-':>11} {alpha:>9} {rec.sigma:9.2e} {rec.h:10.3e} "
            f"{rec.l:12.5e} {rec.res:10.3e} {rec.trials}",
            file=stream,
        )
        for a, reason in rec.trial_log or ():
            print(f"{'':>6} alpha={a:.3e} {reason}", file=stream)
        if rec.restoration_inner:
            print(f"{'':>6} restoration ({rec.restoration_trigger}): {rec.restoration_inner} inner steps", file=stream)


def _cmd_solve(args, out, err):
    try:
        tp = get_problem(args.problem)
        config = _config_from_args(args)
        report = solve(tp.problem, config)
    except (UnknownProblemError, ConfigError) as exc:
        raise UsageError(str(exc)) from exc
    print(report.summary(), file=out)
    if args.json:
        print(report.to_json(indent=2), file=out)
    if args.verbose:
        _print_history(report, err)
        err.write(report.to_text())
    return 0 if report.status == CONVERGED else 1


def _bench_one(name):
    tp = get_problem(name)
    start = time.perf_counter()
    try:
        report = solve(tp.problem)
    except Exception as exc:  # one broken problem must not abort the suite
        return {
            "problem": name, "n": tp.problem.n, "m": tp.problem.m, "status": f"error:{type(exc).__name__}",
            "nit": 0, "nf": 0, "nc": 0, "ng": 0, "res": math.nan, "time_s": time.perf_counter() - start,
        }
    row = report.csv_row()
    row["time_s"] = time.perf_counter() - start
    return row


def bench_records(names, parallel=1):
    """Solve ``names`` with default settings; rows come back in input order."""
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(_bench_one, names))
    return [_bench_one(name) for name in names]


def write_bench_csv(records, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    for r in records:
        writer.writerow([
            r["problem"], r["n"], r["m"], r["status"], r["nit"], r["nf"], r["nc"], r["ng"],
            repr(float(r["res"])), f"{r['time_s']:.4f}",
        ])


def read_bench_csv(path):
    """Parse a bench CSV; raises ``ValueError`` on a wrong header."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != BENCH_HEADER:
            raise ValueError(f"{path}: expected header {','.join(BENCH_HEADER)}")
        records = []
        for row in reader:
            if not row:
                continue
            rec = dict(zip(BENCH_HEADER, row))
            for key in ("n", "m", "nit", "nf", "nc", "ng"):
                rec[key] = int(rec[key])
            rec["res"] = float(rec["res"])
            rec["time_s"] = float(rec["time_s"])
            records.append(rec)
    return records


def performance_profile(tables, metric, log2_grid=None):
    """Dolan-More profiles.

    Parameters
    ----------
    tables : list of list of dict
        One list of bench records per solver.
    metric : str
        Cost column; values are clamped to at least 1 so that zero counts
        give finite ratios.
    log2_grid : array_like, optional
        Points ``log2(tau)``; by default a 0.05-spaced grid from 0 merged with
        every breakpoint of the step functions.

    Returns
    -------
    grid : ndarray
        The ``log2(tau)`` values.
    rho : ndarray, shape (len(grid), n_solvers)
        Fraction of problems with ratio at most ``tau``. Failed or missing
        runs have ratio infinity.
    """
    problems = sorted({rec["problem"] for table in tables for rec in table})
    cost = np.full((len(problems), len(tables)), np.inf)
    index = {p: i for i, p in enumerate(problems)}
    for s, table in enumerate(tables):
        for rec in table:
            if rec["status"] == CONVERGED:
                cost[index[rec["problem"]], s] = max(float(rec[metric]), 1.0)
    best = cost.min(axis=1, keepdims=True)
    with np.errstate(invalid="ignore"):
        ratio = np.where(np.isfinite(best), cost / best, np.inf)
    if log2_grid is None:
        finite = np.log2(ratio[np.isfinite(ratio)])
        top = max(1.0, math.ceil(finite.max())) if finite.size else 1.0
        log2_grid = np.union1d(np.round(np.arange(0.0, top + 1e-12, 0.05), 10), finite)
    grid = np.asarray(log2_grid, dtype=float)
    n_prob = max(len(problems), 1)
    # exact comparison at tau = 1 so that ties count as wins
    rho = np.array([[np.count_nonzero(ratio[:, s] <= 2.0**lt) / n_prob for s in range(len(tables))] for lt in grid])
    return grid, rho


def _solver_labels(paths):
    stems = [Path(p).stem for p in paths]
    if len(set(stems)) == len(stems):
        return stems
    return [str(p) for p in paths]


def _cmd_bench(args, out, err):
    if args.parallel < 1:
        raise UsageError("--parallel must be at least 1")
    names = list(PAPER_SUITE) if args.suite == "paper" else problem_names()
    records = bench_records(names, args.parallel)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_bench_csv(records, fh)
    else:
        write_bench_csv(records, out)
    failed = [r["problem"] for r in records if r["status"] != CONVERGED]
    print(f"{len(records) - len(failed)}/{len(records)} converged", file=err)
    if failed:
        print("not converged: " + " ".join(failed), file=err)
    return 0


def _cmd_profile(args, out, err):
    try:
        tables = [read_bench_csv(p) for p in args.inputs]
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    grid, rho = performance_profile(tables, args.metric)
    labels = _solver_labels(args.inputs)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["log2_tau", "tau", *labels])
        for lt, row in zip(grid, rho):
            writer.writerow([repr(float(lt)), repr(float(2.0**lt)), *(repr(float(v)) for v in row)])
    return 0


def _cmd_list(args, out, err):
    for name in problem_names():
        p = get_problem(name).problem
        print(f"{name:<10} n={p.n:<3} m={p.m}", file=out)
    return 0


_COMMANDS = {"solve": _cmd_solve, "bench": _cmd_bench, "profile": _cmd_profile, "list": _cmd_list}


def main(argv=None, out=None, err=None):
    """Run the CLI and return its exit code (0 ok, 1 not converged, 2 usage error)."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = _build_parser().parse_args(argv)
        return _COMMANDS[args.command](args, out, err)
    except UsageError as exc:
        print(str(exc), file=err)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def run_cli(argv):
    """Run with captured streams; returns ``(code, stdout, stderr)``."""
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()
