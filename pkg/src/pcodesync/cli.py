"""Command line: run one scenario, sweep a grid, verify properties, or
render a report with figures.

Exit codes: 0 success, 1 invalid input or I/O failure, 2 finished without
reaching the convergence threshold, 3 property or invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import InvariantViolation
from .runner import RunResult, run_scenario
from .scenario import ConfigError, load_config
from .sweep import load_sweep, run_sweep
from .trace import TraceWriteError, trace_extension, write_trace
from .verify import sign_flipped_response, verify_corpus, write_report

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_NO_CONVERGENCE = 2
EXIT_INVARIANT_FAILURE = 3


def _fail(message: str, code: int) -> int:
    print(f"pcodesync: {message}", file=sys.stderr)
    return code


def _print_summary(result: RunResult) -> None:
    print(f"events      {result.event_count}")
    print(f"final_p     {result.final_p:.6e}")
    print(f"converged   {'yes' if result.converged else 'no'}")
    print(f"wall_time_s {result.wall_time:.4f}")


def _convergence_exit(result: RunResult) -> int:
    if result.config.stop.p_threshold is None:
        return EXIT_OK
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except (ConfigError, OSError) as exc:
        return _fail(f"invalid config: {exc}", EXIT_INVALID_INPUT)
    try:
        result = run_scenario(config)
    except InvariantViolation as exc:
        return _fail(f"invariant violation: {exc}", EXIT_INVARIANT_FAILURE)
    try:
        with open(args.out, "w", encoding="utf-8") as f:
            write_trace(result.records, f, fmt=args.format, n=config.n)
    except (OSError, TraceWriteError) as exc:
        return _fail(f"trace write failed: {exc}", EXIT_INVALID_INPUT)
    if args.summary:
        _print_summary(result)
    return _convergence_exit(result)


def cmd_sweep(args) -> int:
    try:
        spec = load_sweep(args.config)
    except (ConfigError, OSError) as exc:
        return _fail(f"invalid sweep spec: {exc}", EXIT_INVALID_INPUT)
    results = run_sweep(spec, args.out, fmt=args.format)
    converged = sum(1 for r in results if r.converged)
    errored = sum(1 for r in results if r.error is not None)
    print(f"cells       {len(results)}")
    print(f"converged   {converged}")
    print(f"errors      {errored}")
    print(f"summary     {Path(args.out) / 'summary.csv'}")
    if errored or converged < len(results):
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_verify(args) -> int:
    response = sign_flipped_response if args.inject_bug == "prc-sign" else None
    report = verify_corpus(total_runs=args.seeds, response=response)
    print(report.render_text())
    if args.out:
        try:
            write_report(report, args.out)
        except OSError as exc:
            return _fail(f"report write failed: {exc}", EXIT_INVALID_INPUT)
    return EXIT_OK if report.all_passed else EXIT_INVARIANT_FAILURE


def cmd_report(args) -> int:
    try:
        config = load_config(args.config)
    except (ConfigError, OSError) as exc:
        return _fail(f"invalid config: {exc}", EXIT_INVALID_INPUT)
    try:
        result = run_scenario(config)
    except InvariantViolation as exc:
        return _fail(f"invariant violation: {exc}", EXIT_INVARIANT_FAILURE)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        trace_path = out / f"trace.{trace_extension(args.format)}"
        with open(trace_path, "w", encoding="utf-8") as f:
            write_trace(result.records, f, fmt=args.format, n=config.n)
        summary = {
            "schema_version": 1,
            "n": config.n,
            "l": config.l,
            "omega": config.omega,
            "seed": config.seed,
            "events": result.event_count,
            "final_p": result.final_p,
            "converged": result.converged,
            "wall_time_s": result.wall_time,
        }
        with open(out / "summary.json", "w", encoding="utf-8") as f:
            json.dump(summary, f, indent=2)
            f.write("\n")
        from .plots import render_report_figures  # defer the matplotlib import

        figures = render_report_figures(result, out)
    except (OSError, TraceWriteError) as exc:
        return _fail(f"report write failed: {exc}", EXIT_INVALID_INPUT)
    print(f"trace       {trace_path}")
    for figure in figures:
        print(f"figure      {figure}")
    if args.summary:
        _print_summary(result)
    return _convergence_exit(result)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcodesync",
        description="Simulate and verify phase desynchronization of pulse-coupled oscillators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write its trace")
    p_run.add_argument("--config", required=True, help="scenario JSON path")
    p_run.add_argument("--out", required=True, help="trace output path")
    p_run.add_argument("--summary", action="store_true", help="print run summary")
    p_run.add_argument("--format", choices=("table", "objects"), default="table")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a grid of scenarios")
    p_sweep.add_argument("--config", required=True, help="sweep spec JSON path")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--format", choices=("table", "objects"), default="table")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the property suite over seeded runs")
    p_verify.add_argument("--seeds", type=int, default=1000, help="number of corpus runs")
    p_verify.add_argument("--out", help="write the JSON report here")
    p_verify.add_argument(
        "--inject-bug",
        choices=("prc-sign",),
        help="test-only negative control; the suite must fail",
    )
    p_verify.set_defaults(func=cmd_verify)

    p_report = sub.add_parser(
        "report", help="run one scenario, write trace, summary and figures"
    )
    p_report.add_argument("--config", required=True, help="scenario JSON path")
    p_report.add_argument("--out", required=True, help="output directory")
    p_report.add_argument("--summary", action="store_true", help="print run summary")
    p_report.add_argument("--format", choices=("table", "objects"), default="table")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
