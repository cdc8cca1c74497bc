"""
mf: exact measure-theory checks from the command line.

All input is JSON read from files (or stdin with "-"), all output is JSON on
stdout; logs and the --pretty summaries go to stderr.

Exit codes: 0 everything passed, 1 a verified failure was found,
2 the input was unreadable or an operation's preconditions/budgets failed.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from src.data_loader import load_instance, load_semiring, load_space, parse_set, parse_value, read_document
from src.errors import BudgetExceeded, CertificationFailed, MeasureError, PreconditionFailed
from src.exact_arith import ExtReal
from src.generators import GenKind, GenSpec, generate
from src.outer import COVER_NODE_BUDGET, outer_measure
from src.product import product_measure
from src.reports import reports_frame, suite_summary
from src.spaces import validate_semiring
from src.suite import SuiteConfig, run_suite
from src.theorem import (
    MAX_TAIL_DEPTH,
    certify_sigma_additivity,
    extract_witness,
    null_section_converse,
    null_section_forward,
)
from src.utils import dumps

logger = logging.getLogger("mf")

# --- EXIT CODES ---
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_ERROR = 2


# --- OUTPUT ---

def emit(payload, args) -> None:
    print(dumps(payload, pretty=args.pretty))


def summary(args, message: str) -> None:
    if args.pretty:
        print(message, file=sys.stderr)


# --- SUBCOMMANDS ---

def cmd_validate_semiring(args) -> int:
    report = validate_semiring(load_semiring(args.file))
    emit(report, args)
    summary(args, "✅ Semiring" if report.valid else f"❌ Not a semiring: {len(report.violations)} violations")
    return EXIT_OK if report.valid else EXIT_FAILURE


def cmd_outer(args) -> int:
    space = load_space(args.file)
    target = parse_set(json.loads(args.target), space.universe)
    try:
        result = outer_measure(space, target, node_budget=args.node_budget)
    except BudgetExceeded as exc:
        emit(exc.best, args)
        summary(args, f"⚠️ Budget exhausted; {exc.best.value} is only an upper bound")
        return EXIT_ERROR
    emit(result, args)
    summary(args, f"μ*({target}) = {result.value}")
    return EXIT_OK


def cmd_certify_product(args) -> int:
    instance = load_instance(args.file)
    instance.require("whole", "parts")
    # Level: --t, then the instance file, then 1023/1024 of the product
    t = parse_value(args.t) if args.t else instance.t
    if t is None:
        whole_value = product_measure(instance.space_x.measure, instance.space_y.measure, instance.whole)
        t = ExtReal(whole_value.fraction * Fraction(1023, 1024)) if whole_value.is_finite else ExtReal(1)
    try:
        report = certify_sigma_additivity(
            instance.space_x, instance.space_y, instance.whole, instance.parts, t, max_depth=args.max_depth
        )
    except CertificationFailed as exc:
        emit({"certified": False, "half": exc.half, "truncation": exc.truncation, "message": str(exc), "report": exc.report}, args)
        summary(args, f"❌ Certification failed on the {exc.half} half")
        return EXIT_FAILURE
    emit(report, args)
    summary(args, f"✅ Certified above t = {t} with {len(report.witness.indices)} rectangles")
    return EXIT_OK


def cmd_extract_witness(args) -> int:
    instance = load_instance(args.file)
    if args.r:
        instance.r = parse_value(args.r)
    if args.s:
        instance.s = parse_value(args.s)
    instance.require("d", "cover", "r", "s")
    try:
        witness = extract_witness(
            instance.space_x, instance.space_y, instance.d, instance.cover, instance.r, instance.s, max_depth=args.max_depth
        )
    except CertificationFailed as exc:
        emit({"extracted": False, "message": str(exc), "report": exc.report}, args)
        return EXIT_FAILURE
    emit(witness, args)
    summary(args, f"✅ {witness.lhs} < {witness.rhs} using indices {list(witness.indices)}")
    return EXIT_OK


def cmd_null_section(args) -> int:
    instance = load_instance(args.file)
    instance.require("d")
    directions = {"forward": null_section_forward, "converse": null_section_converse}
    chosen = list(directions) if args.direction == "both" else [args.direction]
    results, failed, applicable = [], False, 0
    # A direction whose preconditions fail is reported, not counted
    for name in chosen:
        try:
            verdict = directions[name](instance.space_x, instance.space_y, instance.d)
        except PreconditionFailed as exc:
            results.append({"direction": name, "applicable": False, "reason": str(exc), "evidence": exc.evidence})
            continue
        applicable += 1
        failed = failed or not verdict.holds
        results.append({"applicable": True, **verdict.to_json()})
        summary(args, f"{'✅' if verdict.holds else '❌'} {name}: exceptional set has outer measure {verdict.exceptional_outer}")
    emit(results, args)
    if failed:
        return EXIT_FAILURE
    return EXIT_OK if applicable else EXIT_ERROR


def cmd_gen(args) -> int:
    spec = GenSpec(
        kind=GenKind(args.kind),
        seed=args.seed,
        pieces=args.pieces,
        size=args.size,
        magnitude=parse_value(args.magnitude),
    )
    emit({"kind": spec.kind, "seed": spec.seed, "instance": generate(spec)}, args)
    return EXIT_OK


def cmd_suite(args) -> int:
    config = SuiteConfig.from_dict(read_document(args.config)) if args.config else SuiteConfig()
    reports = []
    # Stream one JSON line per instance as it finishes
    for report in run_suite(config):
        print(dumps(report.to_json(include_timing=not args.no_timing)))
        reports.append(report)
    if args.pretty and reports:
        print(suite_summary(reports_frame(reports)).to_string(), file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILURE


# --- ARGUMENT PARSER ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mf", description="Exact checks for semirings, outer measures and product measures.")
    parser.add_argument("--pretty", action="store_true", help="indent JSON and print a human summary on stderr")
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--node-budget", type=int, default=COVER_NODE_BUDGET, help="cover search node limit")
    parser.add_argument("--max-depth", type=int, default=MAX_TAIL_DEPTH, help="deepest dyadic tail truncation")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("validate-semiring", help="check the semiring axioms of a family")
    p.add_argument("file")
    p.set_defaults(handler=cmd_validate_semiring)

    p = commands.add_parser("outer", help="compute the generated outer measure of a set")
    p.add_argument("file")
    p.add_argument("--target", required=True, help="set as JSON, e.g. '[0,2]' or '{\"intervals\": [[\"0\",\"1/2\"]]}'")
    p.set_defaults(handler=cmd_outer)

    p = commands.add_parser("certify-product", help="certify countable additivity on a rectangle")
    p.add_argument("file")
    p.add_argument("--t", help="certification level p/q (default: 1023/1024 of the product)")
    p.set_defaults(handler=cmd_certify_product)

    p = commands.add_parser("extract-witness", help="extract a finite witness index set")
    p.add_argument("file")
    p.add_argument("--r")
    p.add_argument("--s")
    p.set_defaults(handler=cmd_extract_witness)

    p = commands.add_parser("null-section", help="check the null-section statements")
    p.add_argument("file")
    p.add_argument("--direction", choices=("forward", "converse", "both"), default="both")
    p.set_defaults(handler=cmd_null_section)

    p = commands.add_parser("gen", help="generate a seeded instance")
    p.add_argument("kind", choices=[k.value for k in GenKind])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--pieces", type=int, default=4)
    p.add_argument("--size", type=int)
    p.add_argument("--magnitude", default="1")
    p.set_defaults(handler=cmd_gen)

    p = commands.add_parser("suite", help="run the acceptance suites")
    p.add_argument("--config", help="suite config JSON (default: every suite at full count)")
    p.add_argument("--no-timing", action="store_true", help="leave wall times out of the reports")
    p.set_defaults(handler=cmd_suite)
    return parser


def main(argv: list[str] | None = None) -> int:
    # 1. Parse arguments
    args = build_parser().parse_args(argv)

    # 2. Logs go to stderr; stdout carries only JSON
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    # 3. Dispatch; input and precondition errors become exit code 2
    try:
        return args.handler(args)
    except (MeasureError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        emit({"error": type(exc).__name__, "message": str(exc)}, args)
        return EXIT_ERROR
    except json.JSONDecodeError as exc:
        logger.error("❌ --target is not JSON: %s", exc)
        emit({"error": "ParseError", "message": str(exc)}, args)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
