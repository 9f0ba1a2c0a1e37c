"""Command-line entry point: ``gradval check|examples|rand``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .corpus import EXAMPLES, rand_suite, run_example
from .instance import InstanceError, evaluate, load
from .series import DEFAULT_SEED

EXIT_PASS, EXIT_MISMATCH, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


def _emit(report: dict, as_json: bool) -> None:
    out = sys.stdout
    if as_json:
        json.dump(report, out, indent=2, default=str)
        out.write("\n")
        return
    for key, val in report.items():
        if isinstance(val, (list, dict)) and not val:
            continue
        out.write(f"{key}: {val}\n")


def _check(args) -> int:
    try:
        inst = load(args.file)
        report = evaluate(inst, bound=args.bound, truncation=args.truncation)
    except InstanceError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(report, args.json)
    if report["mismatches"]:
        for m in report["mismatches"]:
            print(f"mismatch in {m['field']}: expected {m['expected']!r}, got {m['actual']!r}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_PASS


def _examples(args) -> int:
    names = sorted(EXAMPLES) if args.name == "all" else [args.name]
    if args.name != "all" and args.name not in EXAMPLES:
        print(f"input error: unknown example {args.name!r}; choose from {', '.join(sorted(EXAMPLES))} or all",
              file=sys.stderr)
        return EXIT_INPUT
    reports = [run_example(n) for n in names]
    if args.json:
        _emit({"examples": [r.to_dict() for r in reports]}, True)
    else:
        for r in reports:
            status = "PASS" if r.passed else "FAIL"
            print(f"[{status}] {r.name}: {r.verdict}")
            for note in r.notes:
                print(f"    note: {note}")
            if not r.passed:
                print(f"    diff: {r.diff()}")
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_MISMATCH


def _rand(args) -> int:
    try:
        summary = rand_suite(args.dims, args.max_entry, args.count, args.seed)
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(summary.to_dict(), args.json)
    return EXIT_PASS if summary.failed == 0 else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gradval", description="Exact checks on value semigroups and graded extensions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate an instance file")
    p.add_argument("file")
    p.add_argument("--bound", type=int, default=None, help="coordinate bound for cover checks")
    p.add_argument("--truncation", type=int, default=None, help="series truncation or presentation level")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_check)

    p = sub.add_parser("examples", help="run the worked examples")
    p.add_argument("name", nargs="?", default="all")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_examples)

    p = sub.add_parser("rand", help="randomized verifier harness")
    p.add_argument("--dims", type=int, nargs="+", default=[2])
    p.add_argument("--max-entry", type=int, default=5)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=None, help=f"defaults to $GRADVAL_SEED, else {DEFAULT_SEED}")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_rand)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AssertionError as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
