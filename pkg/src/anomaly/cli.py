"""Command line entry point: ``anomaly verify | scan qalpha | glue``."""
from __future__ import annotations

import argparse
import os
import sys
import time

from .lagrangian import SCAN_TOL, qalpha_scan
from .linalg import DEFAULT_TOL, ToleranceConfig
from .report import Report
from .scenario import ScenarioError, load_scenario, run_scenario
from .suites import SUITES, run_suite

__all__ = ["main", "build_parser"]


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _tolerance(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"tolerance must lie in (0, 1), got {text}")
    return value


def _sizes(text):
    try:
        sizes = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None
    if not sizes or any(n <= 0 for n in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def _default_seed() -> int:
    env = os.environ.get("ANOMALY_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise SystemExit(f"anomaly: ANOMALY_SEED must be an integer, got {env!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anomaly", description="Verification harness for Clifford-Fock gluing.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a randomized invariant suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--seed", type=_nonnegative_int, default=None, help="master seed (default: $ANOMALY_SEED or 0)")
    v.add_argument("--cases", type=_positive_int, default=50)
    v.add_argument("--dim-max", type=_positive_int, default=None,
                   help="max space dimension (algebra, gluing) or point rank (functor)")
    v.add_argument("--tol", type=_tolerance, default=DEFAULT_TOL.residual_tol, help="residual tolerance")
    v.add_argument("--report", metavar="PATH")
    v.add_argument("--dump-matrices", action="store_true", help="include worst-case matrices in the report")

    s = sub.add_parser("scan", help="parameter scans")
    ssub = s.add_subparsers(dest="scan", required=True)
    q = ssub.add_parser("qalpha", help="closedness margins of the truncated shift composition")
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--sizes", type=_sizes, required=True, help="comma separated truncation sizes")
    q.add_argument("--report", metavar="PATH")

    g = sub.add_parser("glue", help="run compose/glue/coherence on a scenario file")
    g.add_argument("file")
    g.add_argument("--report", metavar="PATH")
    return p


def _emit(report: Report, path, quiet=False):
    if not quiet:
        for line in report.summary_lines():
            print(line)
    if path:
        report.write(path)


def cmd_verify(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    tol = ToleranceConfig(rank_tol=DEFAULT_TOL.rank_tol, residual_tol=args.tol)
    report = run_suite(args.suite, seed=seed, cases=args.cases, dim_max=args.dim_max, tol=tol,
                       dump_matrices=args.dump_matrices)
    _emit(report, args.report)
    print(f"{args.suite}: {len(report.entries) - report.counts['failed']}/{len(report.entries)} checks passed")
    return report.exit_code


def cmd_scan_qalpha(args) -> int:
    if args.alpha == 0:
        print("anomaly: error: --alpha 0 gives a degenerate scan", file=sys.stderr)
        return 2
    report = Report(seed=None, tolerances={"rank_tol": SCAN_TOL.rank_tol, "residual_tol": SCAN_TOL.residual_tol},
                    scan="qalpha", alpha=args.alpha, sizes=args.sizes)
    start = time.perf_counter()
    rows = qalpha_scan(args.alpha, args.sizes)
    wall = time.perf_counter() - start
    margins = [r["closedness_margin"] for r in rows]
    steps = [b - a for a, b in zip(margins, margins[1:])]
    # strictly decreasing iff every step is negative
    worst = max(steps, default=-1.0)
    report.add("qalpha_margin_decreasing", 0.0 if worst < 0 else 1.0, 0.0, {"table": rows}, wall)
    report.counts = {"sizes": len(rows)}
    print(f"{'N':>6s}  {'closedness_margin':>18s}  {'dim_K':>5s}")
    for r in rows:
        print(f"{r['N']:>6d}  {r['closedness_margin']:>18.6e}  {r['dim_K']:>5d}")
    _emit(report, args.report)
    return report.exit_code


def cmd_glue(args) -> int:
    try:
        sc = load_scenario(args.file)
    except ScenarioError as exc:
        print(f"anomaly: invalid scenario {args.file}: {exc}", file=sys.stderr)
        return 2
    except (TypeError, ValueError) as exc:
        print(f"anomaly: invalid scenario {args.file}: {exc}", file=sys.stderr)
        return 2
    report = run_scenario(sc, source=os.path.basename(args.file))
    _emit(report, args.report)
    for e in report.entries:
        dims = e["metadata"].get("dim_K")
        if dims is not None and e["name"].startswith("compose:"):
            print(f"{e['name']}: dim K = {dims}")
    return report.exit_code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "scan":
        return cmd_scan_qalpha(args)
    return cmd_glue(args)


if __name__ == "__main__":
    sys.exit(main())
