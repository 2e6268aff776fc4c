"""Command-line entry point: solve, gen, and verify subcommands.

All output is deterministic: exact rationals print as p/q, base costs as
plain integers, never floating point.  Exit codes: 0 success, 1 verification
failure, 2 no perfect matching, 3 parse error, 4 structure violation.
"""

from __future__ import annotations

import argparse
import sys

from .errors import (
    GenerationFailed,
    NoPerfectMatching,
    ParseError,
    SchemaMismatch,
    StructureViolation,
)
from .driver import SOLVER_CHOICES, run
from .graph import parse_instance, write_instance
from .oracle import random_instance, verify_trace
from .rational import format_rat

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_NO_MATCHING = 2
EXIT_PARSE = 3
EXIT_STRUCTURE = 4


def _read_instance(path):
    try:
        with open(path) as fh:
            return parse_instance(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def cmd_solve(args) -> int:
    try:
        g = _read_instance(args.instance)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        result = run(g, solver=args.solver, verify=args.verify)
    except NoPerfectMatching as exc:
        print(f"no perfect matching: {exc}", file=sys.stderr)
        return EXIT_NO_MATCHING
    except StructureViolation as exc:
        print(f"structure violation: {exc}", file=sys.stderr)
        records = getattr(exc, "trace_records", None)
        if args.trace and records is not None:
            import json

            header = {
                "schema": "cpmatch-trace-1",
                "n": g.n,
                "m": g.m,
                "edges": [[u, v] for u, v, _c in g.edges],
                "base_costs": [int(c) for _u, _v, c in g.edges],
                "scale_log2": g.m,
                "aborted": str(exc),
            }
            with open(args.trace, "w") as fh:
                fh.write(json.dumps(header, sort_keys=True) + "\n")
                for rec in records:
                    fh.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")
        return EXIT_STRUCTURE

    for e in result.matching:
        u, v, _c = g.edges[e]
        print(f"edge {u} {v}")
    print(f"cost {result.base_cost}")
    print(f"perturbed_cost {format_rat(result.perturbed_cost)}")
    print(f"lp_solves {result.lp_solves}")
    if args.trace:
        result.write_trace(args.trace)
    if args.verify:
        report = verify_trace(g, result.trace_lines())
        for line in report.lines():
            print(line)
        if not report.all_ok:
            return EXIT_VERIFY_FAIL
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        g = random_instance(args.n, args.density, (0, args.cost_max), args.seed)
    except (ValueError, GenerationFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE if isinstance(exc, ValueError) else EXIT_STRUCTURE
    text = write_instance(g)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        g = _read_instance(args.instance)
        with open(args.trace) as fh:
            lines = fh.read().splitlines()
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = verify_trace(g, lines)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return EXIT_PARSE
    for line in report.lines():
        print(line)
    return EXIT_OK if report.all_ok else EXIT_VERIFY_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpmatch",
        description="Minimum-cost perfect matching by cutting planes with half-integral intermediate optima.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("instance")
    p_solve.add_argument("--solver", choices=SOLVER_CHOICES, default="simplex")
    p_solve.add_argument("--trace", help="write a JSONL trace here")
    p_solve.add_argument("--verify", action="store_true", help="replay the trace through all checks")
    p_solve.set_defaults(func=cmd_solve)

    p_gen = sub.add_parser("gen", help="generate a random feasible instance")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--density", type=float, required=True)
    p_gen.add_argument("--cost-max", type=int, default=100)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", default="-")
    p_gen.set_defaults(func=cmd_gen)

    p_verify = sub.add_parser("verify", help="replay a trace against its instance")
    p_verify.add_argument("--instance", required=True)
    p_verify.add_argument("--trace", required=True)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
