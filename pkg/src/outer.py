"""
The outer measure generated by a set function.

    mu*(A) = inf { sum mu(A_n) : A covered by members A_n of the family }

and mu*(A) = inf when no cover exists. On a finite universe a countable cover
can be shortened to a finite one with no larger sum (values are nonnegative,
repeats add nothing), so the infimum is a minimum over finite subfamilies and
the search below is exact. On the interval semiring the infimum for a finite
union of intervals is its canonical total length.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations

from src.errors import BudgetExceeded, NotACover, UniverseMismatch
from src.exact_arith import INF, ZERO, ExtReal, total
from src.reports import CheckReport
from src.spaces import (
    ExplicitSemiring,
    FiniteSet,
    FiniteUniverse,
    Length,
    MeasureDesc,
    MeasureSpace,
    PointMass,
    SetExpr,
    is_subset,
    set_difference,
    set_intersect,
    union_all,
)

logger = logging.getLogger(__name__)

# --- CONFIGURATION ---
COVER_NODE_BUDGET = 200_000
# The all-covers oracle enumerates 2^|family| subfamilies.
EXHAUSTIVE_FAMILY_LIMIT = 12
CARATHEODORY_MAX_POINTS = 12
SUBADDITIVITY_MAX_TERMS = 3


class Exactness(Enum):
    EXACT = "exact"
    UPPER_BOUND = "upper_bound"


@dataclass(frozen=True)
class Cover:
    pieces: tuple[SetExpr, ...]
    target: SetExpr

    def to_json(self) -> dict:
        return {"pieces": [p.to_json() for p in self.pieces], "target": self.target.to_json()}


@dataclass(frozen=True)
class OuterValue:
    value: ExtReal
    witness_cover: Cover | None
    exactness: Exactness

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "witness": None if self.witness_cover is None else [p.to_json() for p in self.witness_cover.pieces],
            "exactness": self.exactness.value,
        }


def cover_bound(m: MeasureDesc, c: Cover) -> ExtReal:
    """
    Sum of mu over the pieces of a cover: one term of the infimum, hence an
    upper bound on mu*(target).

    Raises:
        NotACover: the pieces do not contain the target.
    """
    covered = union_all(c.pieces, set_difference(c.target, c.target))
    if not is_subset(c.target, covered):
        raise NotACover(f"❌ {set_difference(c.target, covered)} is left uncovered.")
    return total(m.evaluate(piece) for piece in c.pieces)


# ==========================================
# FINITE COVER SEARCH
# ==========================================

class _Exhausted(Exception):
    pass


def _branch_and_bound(
    family: tuple[FiniteSet, ...],
    values: tuple[ExtReal, ...],
    target: FiniteSet,
    node_budget: int,
) -> tuple[ExtReal, tuple[int, ...] | None, bool]:
    """
    Minimum-weight cover of `target` by family members.

    Branches on the lowest uncovered point over the members containing it, so
    every cover visited is built from pieces that each add a new point; any
    cover contains such a subcover of no larger weight. Partial sums above the
    incumbent are pruned. Ties are broken by the sorted index tuple.

    Returns (value, chosen indices or None, finished). `finished` is False when
    the node budget ran out and the value is only an upper bound.
    """
    goal = target.mask
    by_point: dict[int, list[tuple[int, int, ExtReal]]] = {}
    for index, member in enumerate(family):
        bits = member.mask & goal
        if not bits:
            continue
        for point in FiniteSet.from_mask(bits):
            by_point.setdefault(point, []).append((index, member.mask, values[index]))

    best_value: ExtReal | None = None
    best_key: tuple[int, ...] | None = None
    nodes = 0

    def visit(uncovered: int, chosen: tuple[int, ...], running: ExtReal) -> None:
        nonlocal best_value, best_key, nodes
        nodes += 1
        if nodes > node_budget:
            raise _Exhausted
        if best_value is not None and running > best_value:
            return
        if not uncovered:
            key = tuple(sorted(chosen))
            if best_value is None or running < best_value or key < best_key:
                best_value, best_key = running, key
            return
        lowest = (uncovered & -uncovered).bit_length() - 1
        for index, bits, value in by_point.get(lowest, ()):
            visit(uncovered & ~bits, chosen + (index,), running + value)

    try:
        visit(goal, (), ZERO)
    except _Exhausted:
        if best_value is None:
            return INF, None, False
        return best_value, best_key, False
    if best_value is None:
        return INF, None, True
    return best_value, best_key, True


def _finite_family(space: MeasureSpace) -> tuple[tuple[FiniteSet, ...], tuple[ExtReal, ...]]:
    semiring = space.semiring
    if not isinstance(semiring, ExplicitSemiring):
        semiring = semiring.materialize()
    family = semiring.family
    return family, tuple(space.measure.evaluate(m) for m in family)


@lru_cache(maxsize=1 << 16)
def _cached_outer(space: MeasureSpace, target: SetExpr, node_budget: int) -> OuterValue:
    if target.is_empty:
        return OuterValue(ZERO, Cover((), target), Exactness.EXACT)

    if isinstance(space.measure, Length):
        return OuterValue(ExtReal(target.length), Cover(tuple(target.pieces()), target), Exactness.EXACT)

    if isinstance(space.measure, PointMass):
        # Any cover's sum dominates the weights of the points it covers.
        return OuterValue(space.measure.evaluate(target), Cover((target,), target), Exactness.EXACT)

    family, values = _finite_family(space)
    value, chosen, finished = _branch_and_bound(family, values, target, node_budget)
    witness = None if chosen is None else Cover(tuple(family[i] for i in chosen), target)
    exactness = Exactness.EXACT if finished else Exactness.UPPER_BOUND
    return OuterValue(value, witness, exactness)


def outer_measure(space: MeasureSpace, a: SetExpr, node_budget: int = COVER_NODE_BUDGET, strict: bool = True) -> OuterValue:
    """
    mu*(a) with a witness cover attaining it.

    Args:
        space: a finite space (any semiring) or the interval length space.
        a: the target set; interval targets must be finite interval unions.
        node_budget: branch-and-bound node limit.
        strict: when False, an exhausted budget returns the best upper bound
            instead of raising.

    Raises:
        BudgetExceeded: the search ran out of nodes (strict mode); `best`
            carries the UPPER_BOUND value found so far.
    """
    if not space.universe.owns(a):
        raise UniverseMismatch(f"❌ {a} does not belong to this space's universe.")
    result = _cached_outer(space, a, node_budget)
    if result.exactness is Exactness.UPPER_BOUND:
        logger.warning("⚠️ Cover search for %s stopped after %d nodes", a, node_budget)
        if strict:
            raise BudgetExceeded(f"❌ Cover search for {a} exceeded {node_budget} nodes.", best=result)
    return result


def outer_measure_exhaustive(space: MeasureSpace, a: FiniteSet) -> OuterValue:
    """
    The all-covers oracle: tries every subfamily, redundant ones included.
    Only for families of at most EXHAUSTIVE_FAMILY_LIMIT members.
    """
    family, values = _finite_family(space)
    if len(family) > EXHAUSTIVE_FAMILY_LIMIT:
        raise BudgetExceeded(f"❌ {len(family)} members is too many for the exhaustive oracle.")
    goal = a.mask
    best: tuple[ExtReal, tuple[int, ...]] | None = None
    for size in range(len(family) + 1):
        for chosen in combinations(range(len(family)), size):
            covered = 0
            for index in chosen:
                covered |= family[index].mask
            if goal & ~covered:
                continue
            weight = total(values[i] for i in chosen)
            if best is None or weight < best[0] or (weight == best[0] and chosen < best[1]):
                best = (weight, chosen)
    if best is None:
        return OuterValue(INF, None, Exactness.EXACT)
    return OuterValue(best[0], Cover(tuple(family[i] for i in best[1]), a), Exactness.EXACT)


# ==========================================
# AXIOM AND MEASURABILITY CHECKS
# ==========================================

def _is_member(space: MeasureSpace, a: SetExpr) -> bool:
    return space.semiring.contains(a)


def check_outer_axioms(
    space: MeasureSpace,
    samples: list[SetExpr],
    max_terms: int = SUBADDITIVITY_MAX_TERMS,
) -> CheckReport:
    """
    Checks on the sample sets: mu*(∅) = 0, monotonicity on every nested pair,
    subadditivity on every sublist of up to `max_terms` samples, and
    mu*(A) <= mu(A) on the samples that belong to the semiring.
    """
    def value(a: SetExpr) -> ExtReal:
        return outer_measure(space, a).value

    violations: list[dict] = []
    counts = {"empty": 1, "monotone": 0, "subadditive": 0, "dominated": 0}
    strict_domination = 0

    # 1. Empty set
    empty_value = value(space.empty())
    if not empty_value.is_zero:
        violations.append({"clause": "empty", "value": empty_value})

    # 2. Monotonicity on nested pairs
    for a in samples:
        for b in samples:
            if a == b or not is_subset(a, b):
                continue
            counts["monotone"] += 1
            if value(a) > value(b):
                violations.append({"clause": "monotone", "small": a, "large": b, "values": [value(a), value(b)]})

    # 3. Subadditivity
    for size in range(2, max_terms + 1):
        for group in combinations(samples, size):
            counts["subadditive"] += 1
            joined = union_all(group, space.empty())
            bound = total(value(g) for g in group)
            if value(joined) > bound:
                violations.append({"clause": "subadditive", "sets": list(group), "union": value(joined), "sum": bound})

    # 4. Outer measure below the measure on members
    for a in samples:
        if not _is_member(space, a):
            continue
        counts["dominated"] += 1
        outer_value, own_value = value(a), space.measure.evaluate(a)
        if outer_value > own_value:
            violations.append({"clause": "dominated", "set": a, "outer": outer_value, "measure": own_value})
        elif outer_value < own_value:
            strict_domination += 1

    return CheckReport(
        check="outer_axioms",
        passed=not violations,
        violations=violations,
        details={"checked": counts, "strictly_dominated": strict_domination},
    )


def caratheodory_measurable(
    space: MeasureSpace,
    d: FiniteSet,
    max_points: int = CARATHEODORY_MAX_POINTS,
    exhaustive: bool = False,
) -> CheckReport:
    """
    Checks mu*(E) = mu*(E ∩ d) + mu*(E ∖ d) for every E ⊆ X, in increasing
    bitmask order, and reports the first E that fails.

    A point-mass outer measure is additive on all subsets, so every d splits
    every E; that case is answered without enumeration unless `exhaustive`.

    Raises:
        BudgetExceeded: the universe has more than `max_points` points.
    """
    if not isinstance(space.universe, FiniteUniverse):
        raise UniverseMismatch("❌ Measurability is only decided on finite universes.")
    if not space.universe.owns(d):
        raise UniverseMismatch(f"❌ {d} does not belong to this space's universe.")
    if isinstance(space.measure, PointMass) and not exhaustive:
        return CheckReport(check="caratheodory", passed=True, details={"set": d, "tested": 0, "method": "additive"})
    if space.universe.size > max_points:
        raise BudgetExceeded(f"❌ {space.universe.size} points exceeds the limit of {max_points} for exhaustive testing.")

    tested = 0
    for test_set in space.universe.subsets():
        tested += 1
        whole = outer_measure(space, test_set).value
        inside = outer_measure(space, set_intersect(test_set, d)).value
        outside = outer_measure(space, set_difference(test_set, d)).value
        if whole != inside + outside:
            return CheckReport(
                check="caratheodory",
                passed=False,
                lhs=whole,
                rhs=inside + outside,
                violations=[{"test_set": test_set, "inside": inside, "outside": outside}],
                details={"set": d, "tested": tested, "method": "exhaustive"},
            )
    return CheckReport(check="caratheodory", passed=True, details={"set": d, "tested": tested, "method": "exhaustive"})


def attainable_values(space: MeasureSpace) -> list[ExtReal]:
    """Sorted distinct values of mu* over all subsets of a finite universe."""
    if not isinstance(space.universe, FiniteUniverse) or space.universe.size > CARATHEODORY_MAX_POINTS:
        raise BudgetExceeded("❌ Attainable outer values are only enumerated on small finite universes.")
    return sorted({outer_measure(space, s).value for s in space.universe.subsets()})

