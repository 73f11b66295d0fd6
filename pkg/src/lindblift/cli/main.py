"""``lindblift`` command line.

Exit codes: 0 success, 2 parse/validation error, 3 numerical failure,
4 comparison outside tolerance.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..errors import NumericalRangeError, SizeGuardError, StepSizeError
from .runner import TRACE_TOL, compare, format_csv, run
from .scenario import METHODS, ScenarioError, parse_scenario

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_TOLERANCE = 4


def _load(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ScenarioError("schema", "", f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(data)


def _methods(text: str) -> list[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown method(s): {', '.join(unknown)}")
    if len(set(methods)) < 2:
        raise argparse.ArgumentTypeError("need at least two distinct methods")
    return methods


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lindblift", description="Lindblad master equation solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run a scenario and write observables as CSV")
    p_solve.add_argument("scenario")
    p_solve.add_argument("--out", help="CSV output file (default: stdout)")
    p_solve.add_argument("--tol", type=float, default=TRACE_TOL, help="trace deviation that flags a run")
    p_solve.add_argument("--workers", type=int, default=1)

    p_cmp = sub.add_parser("compare", help="run a scenario with several methods and report deviations")
    p_cmp.add_argument("scenario")
    p_cmp.add_argument("--methods", type=_methods, required=True, help="comma separated, e.g. expm,rk4,analytic")
    p_cmp.add_argument("--tol", type=float, default=1e-8)
    p_cmp.add_argument("--workers", type=int, default=1)

    p_val = sub.add_parser("validate", help="check a scenario file without running it")
    p_val.add_argument("scenario")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    scenario = None
    try:
        scenario = _load(args.scenario)
        if args.command == "validate":
            print(f"ok: {scenario.kind} model, dim {scenario.dim}, method {scenario.method}, "
                  f"{scenario.times.points} points, columns {','.join(scenario.columns)}")
            return EXIT_OK
        if args.command == "solve":
            report = run(scenario, workers=args.workers, trace_tol=args.tol)
            text = format_csv(report)
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8")
            else:
                sys.stdout.write(text)
            print(json.dumps(report.metadata, sort_keys=True), file=sys.stderr)
            return EXIT_OK
        result = compare(scenario, args.methods, tol=args.tol, workers=args.workers)
        print(json.dumps(result, indent=2, sort_keys=True))
        return EXIT_OK if result["passed"] else EXIT_TOLERANCE
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SizeGuardError as exc:
        print(f"error: [dimension] {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalRangeError, StepSizeError, np.linalg.LinAlgError) as exc:
        method = getattr(scenario, "method", "?")
        print(f"numerical failure (method {method}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
