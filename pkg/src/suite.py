"""
Acceptance suites. Each suite draws its instances from the seeded generators,
runs the kernel on them and emits one RunReport per instance, in index order.
"""
from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterator

import numpy as np

from src.errors import CertificationFailed, MeasureError, ParseError, PreconditionFailed
from src.exact_arith import ExtReal, total
from src.generators import (
    MAX_DENOMINATOR,
    gen_corrupted,
    gen_dyadic_staircase,
    gen_guillotine,
    gen_random_family,
    gen_random_finite_space,
    gen_random_rect_family,
)
from src.outer import (
    EXHAUSTIVE_FAMILY_LIMIT,
    check_outer_axioms,
    outer_measure,
    outer_measure_exhaustive,
)
from src.product import ProductSet, Rect, RectFamily, covers, product_measure
from src.reports import CheckReport, RunReport
from src.spaces import (
    ExplicitSemiring,
    FiniteSet,
    IntervalUnion,
    MeasureSpace,
    check_finite_additivity,
    counting_space,
    length_space,
    materialized,
    point_mass_space,
    validate_semiring,
)
from src.theorem import (
    certify_sigma_additivity,
    check_null_section_equivalence,
    extract_witness,
    null_section_converse,
    recheck_witness,
)
from src.utils import dumps

logger = logging.getLogger(__name__)

# --- CONFIGURATION ---
SUITES = (
    "semiring_axioms",
    "outer_axioms",
    "product_exactness",
    "certification",
    "witness_soundness",
    "null_sections",
    "negative_path",
)
DEFAULT_COUNTS = {
    "semiring_axioms": 1000,
    "outer_axioms": 50,
    "product_exactness": 500,
    "certification": 100,
    "witness_soundness": 1000,
    # 20 measures for each of the nine (|X|, |Y|) shapes up to 3 × 3.
    "null_sections": 180,
    "negative_path": 200,
}
CERTIFICATION_LEVELS = 10
GUILLOTINE_MAX_PIECES = 64
CONFIG_KEYS = {"suites", "seed", "counts", "max_denominator", "include_corrupted"}


@dataclass
class SuiteConfig:
    suites: tuple[str, ...] = SUITES
    seed: int = 0
    counts: dict[str, int] = field(default_factory=dict)
    max_denominator: int = MAX_DENOMINATOR
    include_corrupted: bool = True

    @classmethod
    def from_dict(cls, payload: dict) -> SuiteConfig:
        """
        Reads a suite config document.

        Raises:
            ParseError: unknown keys, unknown suite names or ill-typed values.
        """
        if not isinstance(payload, dict):
            raise ParseError("❌ A suite config must be a JSON object.")
        unknown = set(payload) - CONFIG_KEYS
        if unknown:
            raise ParseError(f"❌ Unknown config keys: {sorted(unknown)}")
        suites = tuple(payload.get("suites", SUITES))
        counts = payload.get("counts", {})
        if not isinstance(counts, dict):
            raise ParseError("❌ 'counts' must map suite names to instance counts.")
        for name in suites + tuple(counts):
            if name not in SUITES:
                raise ParseError(f"❌ Unknown suite {name!r}. Available: {', '.join(SUITES)}")
        for key in ("seed", "max_denominator"):
            value = payload.get(key, 0 if key == "seed" else MAX_DENOMINATOR)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ParseError(f"❌ {key!r} must be a non-negative integer.")
        for name, n in counts.items():
            if isinstance(n, bool) or not isinstance(n, int) or n < 0:
                raise ParseError(f"❌ Count for {name!r} must be a non-negative integer.")
        include = payload.get("include_corrupted", True)
        if not isinstance(include, bool):
            raise ParseError("❌ 'include_corrupted' must be true or false.")
        return cls(
            suites=suites,
            seed=payload.get("seed", 0),
            counts=dict(counts),
            max_denominator=payload.get("max_denominator", MAX_DENOMINATOR),
            include_corrupted=include,
        )

    def count(self, suite: str) -> int:
        return self.counts.get(suite, DEFAULT_COUNTS[suite])


def instance_seed(base: int, suite: str, index: int) -> int:
    """Independent per-instance seed derived from (base seed, suite, index)."""
    state = np.random.SeedSequence([base, SUITES.index(suite), index]).generate_state(1)
    return int(state[0])


# ==========================================
# ORACLES AND DETECTORS
# ==========================================

def semiring_oracle(sr: ExplicitSemiring) -> bool:
    """
    Brute-force semiring test on point sets: ∅ present, pairwise
    intersections present, and every difference the union of some pairwise
    disjoint subfamily of members (all subfamilies tried).
    """
    members = {frozenset(m) for m in sr.family}
    if frozenset() not in members:
        return False
    for a in members:
        for b in members:
            if a & b not in members:
                return False
            rest = a - b
            if not rest:
                continue
            inside = [m for m in members if m and m <= rest]
            if not any(
                sum(len(m) for m in group) == len(rest) and frozenset().union(*group) == rest
                for size in range(1, len(inside) + 1)
                for group in combinations(inside, size)
            ):
                return False
    return True


def _splits(space: MeasureSpace) -> Iterator[tuple[FiniteSet, FiniteSet, FiniteSet]]:
    """(W, V, W ∖ V) for members W, V with V a proper non-empty part and W ∖ V a member."""
    family = space.semiring.family
    positions = set(family)
    for whole in family:
        for part in family:
            if part.is_empty or part == whole or part.mask & ~whole.mask:
                continue
            rest = FiniteSet.from_mask(whole.mask & ~part.mask)
            if rest in positions:
                yield whole, part, rest


def flag_corruption(space: MeasureSpace) -> CheckReport:
    """
    Looks for evidence that a finite set function is not a measure: finite
    additivity on every split W = V ⊎ (W ∖ V) of family members, and
    certification of the row partition (W × {0}) = (V × {0}) ⊎ ((W ∖ V) × {0})
    against a one-point counting factor. Passes when nothing is flagged.
    """
    space = materialized(space)
    row = counting_space(1)
    violations = []
    checked = 0
    for whole, part, rest in _splits(space):
        checked += 1
        # A. Finite additivity on the split
        additivity = check_finite_additivity(space.measure, whole, [part, rest])
        if not additivity.passed:
            violations.append({
                "detector": "finite_additivity",
                "whole": whole,
                "parts": [part, rest],
                "lhs": additivity.lhs,
                "rhs": additivity.rhs,
            })
        # B. Certification of the same split as a one-row rectangle partition
        value = space.measure.evaluate(whole)
        if value.is_zero:
            continue
        t = ExtReal(value.fraction / 2) if value.is_finite else ExtReal(1)
        cells = FiniteSet.of(0)
        parts = RectFamily((Rect(part, cells), Rect(rest, cells)))
        try:
            certify_sigma_additivity(space, row, Rect(whole, cells), parts, t)
        except CertificationFailed as exc:
            violations.append({"detector": "certification", "whole": whole, "half": exc.half, "truncation": exc.truncation})
    return CheckReport(check="corruption", passed=not violations, violations=violations, details={"splits": checked})


# ==========================================
# SUITES
# ==========================================

def _semiring_axioms(index: int, seed: int, config: SuiteConfig) -> RunReport:
    sr = gen_random_family(seed)
    report = validate_semiring(sr)
    oracle = semiring_oracle(sr)
    verdicts = {"validator": report, "oracle": oracle, "agree": report.valid == oracle}
    return RunReport("semiring_axioms", index, seed, sr.to_json(), verdicts, report.valid == oracle)


def _outer_axioms(index: int, seed: int, config: SuiteConfig) -> RunReport:
    space = gen_random_finite_space(seed, max_denominator=config.max_denominator)
    subsets = list(space.universe.subsets())
    axioms = check_outer_axioms(space, subsets)
    family = materialized(space).semiring.family
    disagreements = []
    if len(family) <= EXHAUSTIVE_FAMILY_LIMIT:
        for a in subsets:
            searched = outer_measure(space, a).value
            oracle = outer_measure_exhaustive(materialized(space), a).value
            if searched != oracle:
                disagreements.append({"set": a, "search": searched, "oracle": oracle})
    unequal_members = [m for m in family if outer_measure(space, m).value != space.measure.evaluate(m)]
    verdicts = {"axioms": axioms, "oracle_disagreements": disagreements, "member_mismatches": unequal_members}
    passed = axioms.passed and not disagreements and not unequal_members
    return RunReport("outer_axioms", index, seed, space.to_json(), verdicts, passed)


def _random_rational_rect(rng: np.random.Generator, max_denominator: int) -> Rect:
    def side() -> IntervalUnion:
        den = int(rng.integers(1, max_denominator + 1))
        a = int(rng.integers(0, 2 * den))
        b = a + int(rng.integers(1, 2 * den + 1))
        return IntervalUnion.interval(Fraction(a, den), Fraction(b, den))

    return Rect(side(), side())


def _product_exactness(index: int, seed: int, config: SuiteConfig) -> RunReport:
    rng = np.random.default_rng(seed)
    whole = _random_rational_rect(rng, config.max_denominator)
    pieces = int(rng.integers(1, GUILLOTINE_MAX_PIECES + 1))
    parts = gen_guillotine(seed, pieces, whole, config.max_denominator)
    space = length_space()
    expected = product_measure(space.measure, space.measure, whole)
    found = total(product_measure(space.measure, space.measure, r) for r in parts.rects)
    disjoint = not parts.overlapping_pairs()
    same_union = covers([whole], parts.rects) and covers(parts.rects, [whole])
    verdicts = {"whole_value": expected, "sum": found, "disjoint": disjoint, "same_union": same_union}
    passed = disjoint and same_union and found == expected
    return RunReport("product_exactness", index, seed, {"whole": whole, "parts": parts}, verdicts, passed)


def _certify_levels(whole: Rect, parts: RectFamily, space: MeasureSpace, staircase: bool) -> tuple[list[dict], bool]:
    results = []
    passed = True
    value = product_measure(space.measure, space.measure, whole)
    for k in range(1, CERTIFICATION_LEVELS + 1):
        t = ExtReal(value.fraction - Fraction(1, 2 ** k))
        cert = certify_sigma_additivity(space, space, whole, parts, t)
        payload = json.loads(dumps(cert.witness))
        ok = recheck_witness(payload).passed and cert.witness.rhs > t
        if staircase:
            ok = ok and cert.required_depth == k and cert.depth_used >= k
        results.append({"k": k, "t": t, "certificate": cert, "ok": ok})
        passed = passed and ok
    return results, passed


def _certification(index: int, seed: int, config: SuiteConfig) -> RunReport:
    space = length_space()
    whole, staircase = gen_dyadic_staircase(seed)
    square = Rect(IntervalUnion.interval(0, 1), IntervalUnion.interval(0, 1))
    pieces = 1 + index % GUILLOTINE_MAX_PIECES
    partition = gen_guillotine(seed, pieces, square, config.max_denominator)
    tail_results, tail_ok = _certify_levels(whole, staircase, space, staircase=True)
    finite_results, finite_ok = _certify_levels(square, partition, space, staircase=False)
    instance = {"staircase": {"whole": whole, "parts": staircase}, "partition": {"whole": square, "parts": partition}}
    verdicts = {"staircase": tail_results, "partition": finite_results}
    return RunReport("certification", index, seed, instance, verdicts, tail_ok and finite_ok)


def _witness_soundness(index: int, seed: int, config: SuiteConfig) -> RunReport:
    pieces = 1 + index % 16
    instance = gen_random_rect_family(seed, pieces, config.max_denominator)
    witness = extract_witness(instance.space_x, instance.space_y, instance.d, instance.cover, instance.r, instance.s)
    recheck = recheck_witness(json.loads(dumps(witness)))
    verdicts = {"witness": witness, "recheck": recheck}
    return RunReport("witness_soundness", index, seed, instance.to_json(), verdicts, recheck.passed)


def _null_sections(index: int, seed: int, config: SuiteConfig) -> RunReport:
    size_x, size_y = 1 + index % 3, 1 + (index // 3) % 3
    rng = np.random.default_rng(seed)
    choices = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))

    def weights(size: int) -> list[Fraction]:
        return [choices[int(rng.integers(len(choices)))] for _ in range(size)]

    space_x, space_y = point_mass_space(weights(size_x)), point_mass_space(weights(size_y))
    ux, uy = space_x.universe, space_y.universe
    cells = [(x, y) for x in ux.points() for y in uy.points()]
    counterexamples = []
    forward_checked = converse_checked = 0
    for mask in range(1 << len(cells)):
        d = ProductSet.from_points((c for i, c in enumerate(cells) if mask >> i & 1), ux, uy)
        # 1. Forward direction, paired with the direct section scan
        equivalence = check_null_section_equivalence(space_x, space_y, d)
        forward = equivalence.details["forward"]
        if forward is not None:
            forward_checked += 1
            if not forward.holds:
                counterexamples.append({"direction": "forward", "d": d, "verdict": forward})
        if not equivalence.passed:
            counterexamples.append({"direction": "equivalence", "d": d, "report": equivalence})

        # 2. Converse, wherever its preconditions hold
        try:
            verdict = null_section_converse(space_x, space_y, d)
        except PreconditionFailed:
            continue
        converse_checked += 1
        if not verdict.holds:
            counterexamples.append({"direction": "converse", "d": d, "verdict": verdict})
    instance = {"x": space_x, "y": space_y}
    verdicts = {"forward_checked": forward_checked, "converse_checked": converse_checked, "counterexamples": counterexamples}
    return RunReport("null_sections", index, seed, instance, verdicts, not counterexamples)


def _negative_path(index: int, seed: int, config: SuiteConfig) -> RunReport:
    rng = np.random.default_rng(seed)
    base = gen_random_finite_space(seed, size=int(rng.integers(2, 4)), max_denominator=config.max_denominator, min_blocks=2)
    control = flag_corruption(base)
    verdicts = {"control": control}
    instance = {"base": base}
    passed = control.passed
    if config.include_corrupted:
        magnitude = ExtReal(_positive_magnitude(rng))
        corrupted = gen_corrupted(seed, base, magnitude)
        flagged = flag_corruption(corrupted)
        instance.update({"corrupted": corrupted, "magnitude": magnitude})
        verdicts["corrupted"] = flagged
        passed = passed and not flagged.passed
    return RunReport("negative_path", index, seed, instance, verdicts, passed, expected_negative=config.include_corrupted)


def _positive_magnitude(rng: np.random.Generator) -> Fraction:
    den = int(rng.integers(1, 5))
    return Fraction(int(rng.integers(1, 2 * den + 1)), den)


RUNNERS: dict[str, Callable[[int, int, SuiteConfig], RunReport]] = {
    "semiring_axioms": _semiring_axioms,
    "outer_axioms": _outer_axioms,
    "product_exactness": _product_exactness,
    "certification": _certification,
    "witness_soundness": _witness_soundness,
    "null_sections": _null_sections,
    "negative_path": _negative_path,
}


def run_instance(suite: str, index: int, config: SuiteConfig) -> RunReport:
    """Runs one instance; kernel errors become a failed report rather than an exception."""
    seed = instance_seed(config.seed, suite, index)
    start = time.perf_counter()
    try:
        report = RUNNERS[suite](index, seed, config)
    except MeasureError as exc:
        logger.error("❌ %s[%d] raised %s: %s", suite, index, type(exc).__name__, exc)
        report = RunReport(suite, index, seed, {}, {"error": type(exc).__name__, "message": str(exc)}, False)
    report.wall_time = time.perf_counter() - start
    return report


def run_suite(config: SuiteConfig) -> Iterator[RunReport]:
    """Streams one RunReport per instance, suites in config order, instances by index."""
    for suite in config.suites:
        count = config.count(suite)
        logger.info("🚀 Starting suite %s (%d instances)", suite, count)
        failures = 0
        for index in range(count):
            report = run_instance(suite, index, config)
            failures += not report.passed
            yield report
        if failures:
            logger.warning("❌ %s: %d of %d instances failed", suite, failures, count)
        else:
            logger.info("✅ %s: all %d instances passed", suite, count)
