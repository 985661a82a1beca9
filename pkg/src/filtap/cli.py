"""Command line front end: ``filtap run`` and ``filtap verify``.

Exit codes: 0 ok, 2 refused (a mathematical outcome such as a residual
outside the ideal, or a certificate that fails to verify), 1 error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .errors import FiltapError, Refusal
from .tasks import Problem, dump_report, run_problem, verify_report

EXIT = {"ok": 0, "refused": 2, "error": 1}


def _error_report(exc: FiltapError) -> dict:
    return {"status": "error", "reason": exc.reason, "message": str(exc)}


def cmd_run(args) -> int:
    try:
        problem = Problem.load(args.problem)
    except FiltapError as exc:
        sys.stdout.write(dump_report(_error_report(exc)))
        return 1
    out_dir, stem = None, "report"
    if args.out:
        out_dir = os.path.dirname(os.path.abspath(args.out))
        stem = os.path.splitext(os.path.basename(args.out))[0]
    start = time.perf_counter()
    report = run_problem(problem, order=args.order, trace=args.trace, seed=args.seed,
                         out_dir=out_dir, stem=stem)
    if args.timings:
        report["timings"] = {"total_seconds": round(time.perf_counter() - start, 6)}
    text = dump_report(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if report["status"] != "ok":
        print(f"{report['status']}: {report['reason']}: {report['message']}", file=sys.stderr)
    return EXIT[report["status"]]


def cmd_verify(args) -> int:
    try:
        with open(args.report) as fh:
            report = json.load(fh)
        problem = Problem.load(args.problem)
        verify_report(report, problem, os.path.dirname(os.path.abspath(args.report)))
    except Refusal as exc:
        print(f"refused: {exc.reason}: {exc}", file=sys.stderr)
        return 2
    except FiltapError as exc:
        print(f"error: {exc.reason}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: malformed report: {exc}", file=sys.stderr)
        return 1
    print("verified")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="filtap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve a problem file and write a report")
    run.add_argument("problem", help="problem JSON file")
    run.add_argument("--out", help="write the report here instead of standard output")
    run.add_argument("--order", type=int, help="override the target order")
    run.add_argument("--trace", action="store_true", help="include the iteration trace")
    run.add_argument("--seed", type=int, help="jitter borel grids with this seed")
    run.add_argument("--timings", action="store_true",
                     help="record wall-clock time (makes reports non-reproducible)")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="re-check a report's certificates")
    ver.add_argument("report", help="report JSON written by run")
    ver.add_argument("problem", help="the problem file the report came from")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "order", None) is not None and args.order < 0:
        print("error: --order must be non-negative", file=sys.stderr)
        return 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
