"""
Sets, semirings of sets, measures on semirings and measure spaces.

Two universes are supported: a finite labelled set {0, ..., n-1} and the
rational line, whose sets are finite unions of half-open intervals [a, b).
Every value type here is a frozen dataclass, so spaces can be shared, hashed
and memoized freely.
"""
from __future__ import annotations

import logging
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from operator import itemgetter
from typing import Iterable, Iterator, Mapping, Union

from src.errors import (
    InvalidDescriptor,
    NoDecomposition,
    NotInDomain,
    PreconditionFailed,
    UniverseMismatch,
)
from src.exact_arith import ZERO, ExtReal, format_rational, total
from src.reports import CheckReport

logger = logging.getLogger(__name__)

# --- CONFIGURATION ---
# Finite universes stay small enough for power-set style enumeration.
MAX_FINITE_UNIVERSE = 64
# Largest universe whose power set may be written out as an explicit family.
POWER_SET_MATERIALIZE_LIMIT = 8


# ==========================================
# SETS
# ==========================================

@dataclass(frozen=True)
class FiniteSet:
    """A subset of a finite universe, stored as a sorted duplicate-free tuple of point ids."""

    members: tuple[int, ...] = ()

    def __post_init__(self):
        raw = tuple(self.members)
        for point in raw:
            if isinstance(point, bool) or not isinstance(point, int) or point < 0:
                raise InvalidDescriptor(f"❌ Finite set members must be point ids >= 0, got {point!r}")
        object.__setattr__(self, "members", tuple(sorted(set(raw))))

    @classmethod
    def of(cls, *points: int) -> FiniteSet:
        return cls(tuple(points))

    @classmethod
    def from_mask(cls, mask: int) -> FiniteSet:
        points = []
        index = 0
        while mask:
            if mask & 1:
                points.append(index)
            mask >>= 1
            index += 1
        return cls(tuple(points))

    @cached_property
    def mask(self) -> int:
        bits = 0
        for point in self.members:
            bits |= 1 << point
        return bits

    @property
    def is_empty(self) -> bool:
        return not self.members

    def __contains__(self, point) -> bool:
        return point in self.members

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def to_json(self) -> list[int]:
        return list(self.members)

    def __str__(self) -> str:
        return "{" + ",".join(str(p) for p in self.members) + "}"


def canonical_intervals(pairs: Iterable) -> tuple[tuple[Fraction, Fraction], ...]:
    """
    Sorts and merges half-open intervals into the canonical form: pairwise
    disjoint, non-adjacent, ordered by left endpoint. [a, a) vanishes.
    """
    cleaned = []
    for pair in pairs:
        a, b = Fraction(pair[0]), Fraction(pair[1])
        if a > b:
            raise InvalidDescriptor(f"❌ Interval [{a}, {b}) has its endpoints reversed.")
        if a < b:
            cleaned.append((a, b))
    cleaned.sort()
    merged: list[tuple[Fraction, Fraction]] = []
    for a, b in cleaned:
        if merged and a <= merged[-1][1]:
            last_a, last_b = merged[-1]
            merged[-1] = (last_a, max(last_b, b))
        else:
            merged.append((a, b))
    return tuple(merged)


@dataclass(frozen=True)
class IntervalUnion:
    """A finite union of half-open rational intervals, kept in canonical form."""

    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", canonical_intervals(self.intervals))

    @classmethod
    def interval(cls, a, b) -> IntervalUnion:
        return cls(((Fraction(a), Fraction(b)),))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def length(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    @property
    def endpoints(self) -> tuple[Fraction, ...]:
        return tuple(x for pair in self.intervals for x in pair)

    def __contains__(self, point) -> bool:
        x = Fraction(point)
        index = bisect_right(self.intervals, x, key=itemgetter(0)) - 1
        if index < 0:
            return False
        a, b = self.intervals[index]
        return a <= x < b

    def pieces(self) -> list[IntervalUnion]:
        return [IntervalUnion((pair,)) for pair in self.intervals]

    def to_json(self) -> dict:
        return {"intervals": [[format_rational(a), format_rational(b)] for a, b in self.intervals]}

    def __str__(self) -> str:
        if not self.intervals:
            return "∅"
        return " ∪ ".join(f"[{a},{b})" for a, b in self.intervals)


SetExpr = Union[FiniteSet, IntervalUnion]


def _same_kind(a: SetExpr, b: SetExpr) -> None:
    if type(a) is not type(b):
        raise UniverseMismatch(f"❌ Cannot combine {type(a).__name__} with {type(b).__name__}.")


def set_intersect(a: SetExpr, b: SetExpr) -> SetExpr:
    _same_kind(a, b)
    if isinstance(a, FiniteSet):
        return FiniteSet.from_mask(a.mask & b.mask)
    result = []
    i = j = 0
    while i < len(a.intervals) and j < len(b.intervals):
        a0, a1 = a.intervals[i]
        b0, b1 = b.intervals[j]
        lo, hi = max(a0, b0), min(a1, b1)
        if lo < hi:
            result.append((lo, hi))
        if a1 <= b1:
            i += 1
        else:
            j += 1
    return IntervalUnion(tuple(result))


def set_union(a: SetExpr, b: SetExpr) -> SetExpr:
    _same_kind(a, b)
    if isinstance(a, FiniteSet):
        return FiniteSet.from_mask(a.mask | b.mask)
    return IntervalUnion(a.intervals + b.intervals)


def set_difference(a: SetExpr, b: SetExpr) -> SetExpr:
    _same_kind(a, b)
    if isinstance(a, FiniteSet):
        return FiniteSet.from_mask(a.mask & ~b.mask)
    result = []
    for lo, hi in a.intervals:
        cursor = lo
        for c, d in b.intervals:
            if d <= cursor or c >= hi:
                continue
            if c > cursor:
                result.append((cursor, c))
            cursor = max(cursor, d)
            if cursor >= hi:
                break
        if cursor < hi:
            result.append((cursor, hi))
    return IntervalUnion(tuple(result))


def union_all(sets: Iterable[SetExpr], empty: SetExpr) -> SetExpr:
    result = empty
    for item in sets:
        result = set_union(result, item)
    return result


def is_subset(a: SetExpr, b: SetExpr) -> bool:
    return set_difference(a, b).is_empty


def is_disjoint(a: SetExpr, b: SetExpr) -> bool:
    return set_intersect(a, b).is_empty


def contains_point(a: SetExpr, point) -> bool:
    return point in a


# ==========================================
# UNIVERSES
# ==========================================

@dataclass(frozen=True)
class FiniteUniverse:
    """The labelled points 0..size-1."""

    size: int

    def __post_init__(self):
        if not 1 <= self.size <= MAX_FINITE_UNIVERSE:
            raise InvalidDescriptor(
                f"❌ Finite universes hold 1..{MAX_FINITE_UNIVERSE} points, got {self.size}."
            )

    def points(self) -> range:
        return range(self.size)

    def full(self) -> FiniteSet:
        return FiniteSet(tuple(range(self.size)))

    def empty(self) -> FiniteSet:
        return FiniteSet()

    def owns(self, a: SetExpr) -> bool:
        return isinstance(a, FiniteSet) and (a.is_empty or a.members[-1] < self.size)

    def subsets(self) -> Iterator[FiniteSet]:
        """All subsets in increasing bitmask order."""
        for mask in range(1 << self.size):
            yield FiniteSet.from_mask(mask)

    def to_json(self) -> dict:
        return {"finite": self.size}


@dataclass(frozen=True)
class IntervalUniverse:
    """The rational line, seen through half-open intervals."""

    def empty(self) -> IntervalUnion:
        return IntervalUnion()

    def owns(self, a: SetExpr) -> bool:
        return isinstance(a, IntervalUnion)

    def to_json(self) -> str:
        return "interval"


Universe = Union[FiniteUniverse, IntervalUniverse]


def complement(a: FiniteSet, universe: FiniteUniverse) -> FiniteSet:
    """X minus A, for finite universes."""
    if not isinstance(universe, FiniteUniverse):
        raise UniverseMismatch("❌ Complements are only representable in finite universes.")
    if not universe.owns(a):
        raise UniverseMismatch(f"❌ {a} is not a subset of a {universe.size}-point universe.")
    return set_difference(universe.full(), a)


# ==========================================
# SEMIRINGS
# ==========================================

@dataclass(frozen=True)
class ExplicitSemiring:
    """
    A finite family of subsets of a finite universe that is claimed to be a
    semiring. The claim is checked by validate_semiring, not here: only
    duplicates and out-of-range members are rejected at construction.
    """

    universe: FiniteUniverse
    family: tuple[FiniteSet, ...]

    def __post_init__(self):
        family = tuple(self.family)
        seen = set()
        for member in family:
            if not isinstance(member, FiniteSet) or not self.universe.owns(member):
                raise InvalidDescriptor(f"❌ {member} is not a subset of the {self.universe.size}-point universe.")
            if member in seen:
                raise InvalidDescriptor(f"❌ Duplicate family member {member}.")
            seen.add(member)
        object.__setattr__(self, "family", family)

    @cached_property
    def _positions(self) -> dict[FiniteSet, int]:
        return {member: i for i, member in enumerate(self.family)}

    def contains(self, a: SetExpr) -> bool:
        return a in self._positions

    def index_of(self, a: SetExpr) -> int:
        try:
            return self._positions[a]
        except KeyError:
            raise NotInDomain(f"❌ {a} is not a member of the family.") from None

    @cached_property
    def is_algebra(self) -> bool:
        if not self.family:
            return False
        members = self._positions
        for a in self.family:
            if complement(a, self.universe) not in members:
                return False
        for a, b in combinations(self.family, 2):
            if set_intersect(a, b) not in members:
                return False
        return True

    @property
    def is_sigma_algebra(self) -> bool:
        # A countable union over a finite family is a finite union.
        return self.is_algebra

    def to_json(self) -> dict:
        return {"explicit": [m.to_json() for m in self.family]}


@dataclass(frozen=True)
class PowerSetSemiring:
    """Every subset of a finite universe."""

    universe: FiniteUniverse

    def contains(self, a: SetExpr) -> bool:
        return self.universe.owns(a)

    is_algebra = True
    is_sigma_algebra = True

    def materialize(self) -> ExplicitSemiring:
        if self.universe.size > POWER_SET_MATERIALIZE_LIMIT:
            raise InvalidDescriptor(
                f"❌ Refusing to write out 2^{self.universe.size} sets "
                f"(limit {POWER_SET_MATERIALIZE_LIMIT} points)."
            )
        return ExplicitSemiring(self.universe, tuple(self.universe.subsets()))

    def to_json(self) -> str:
        return "power_set"


@dataclass(frozen=True)
class IntervalSemiring:
    """All half-open intervals [a, b) with a <= b, the empty interval included."""

    universe: IntervalUniverse = field(default_factory=IntervalUniverse)

    def contains(self, a: SetExpr) -> bool:
        return isinstance(a, IntervalUnion) and len(a.intervals) <= 1

    is_algebra = False
    is_sigma_algebra = False

    def to_json(self) -> str:
        return "interval"


SemiringDesc = Union[ExplicitSemiring, PowerSetSemiring, IntervalSemiring]


def _exact_partition(target: FiniteSet, family: tuple[FiniteSet, ...]) -> list[int] | None:
    """
    Backtracking search for family members that partition `target`.

    Branches on the lowest uncovered point and tries members in family order,
    so the first partition found is deterministic.
    """
    goal = target.mask
    candidates = [(i, m.mask) for i, m in enumerate(family) if m.mask and not m.mask & ~goal]

    def search(remaining: int, chosen: list[int]) -> list[int] | None:
        if not remaining:
            return chosen
        lowest = remaining & -remaining
        for index, bits in candidates:
            if bits & lowest and not bits & ~remaining:
                found = search(remaining & ~bits, chosen + [index])
                if found is not None:
                    return found
        return None

    return search(goal, [])


def semiring_difference(a: SetExpr, b: SetExpr, sr: SemiringDesc) -> list[SetExpr]:
    """
    Writes a minus b as a list of pairwise disjoint semiring members.

    Raises:
        NotInDomain: a or b is not a member of sr.
        NoDecomposition: no such list exists, so sr is not a semiring.
    """
    for item in (a, b):
        if not sr.contains(item):
            raise NotInDomain(f"❌ {item} is not a member of the semiring.")
    rest = set_difference(a, b)
    if rest.is_empty:
        return []
    if isinstance(sr, IntervalSemiring):
        return rest.pieces()
    if isinstance(sr, PowerSetSemiring):
        return [rest]
    chosen = _exact_partition(rest, sr.family)
    if chosen is None:
        raise NoDecomposition(f"❌ {a} ∖ {b} = {rest} is not a disjoint union of family members.", a, b)
    return [sr.family[i] for i in sorted(chosen)]


@dataclass(frozen=True)
class Violation:
    kind: str
    left: SetExpr | None = None
    right: SetExpr | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "left": None if self.left is None else self.left.to_json(),
            "right": None if self.right is None else self.right.to_json(),
            "detail": self.detail,
        }


@dataclass
class ValidationReport:
    valid: bool
    is_algebra: bool
    is_sigma_algebra: bool
    violations: list[Violation] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "is_algebra": self.is_algebra,
            "is_sigma_algebra": self.is_sigma_algebra,
            "violations": [v.to_json() for v in self.violations],
        }


def validate_semiring(sr: SemiringDesc) -> ValidationReport:
    """
    Checks the three semiring axioms over every pair of an explicit family.

    The symbolic power-set and interval semirings are valid by construction.
    Every violation found is listed with the offending pair.
    """
    if not isinstance(sr, ExplicitSemiring):
        return ValidationReport(True, sr.is_algebra, sr.is_sigma_algebra)

    violations: list[Violation] = []
    if not sr.contains(FiniteSet()):
        violations.append(Violation("missing_empty", detail="∅ is not in the family"))

    for i, a in enumerate(sr.family):
        for b in sr.family[i + 1:]:
            meet = set_intersect(a, b)
            if not sr.contains(meet):
                violations.append(Violation("intersection", a, b, f"{meet} is missing"))

    for a in sr.family:
        for b in sr.family:
            rest = set_difference(a, b)
            if rest.is_empty:
                continue
            if _exact_partition(rest, sr.family) is None:
                violations.append(Violation("difference", a, b, f"{rest} has no disjoint decomposition"))

    if violations:
        logger.debug("Family of %d sets fails %d semiring checks", len(sr.family), len(violations))
    return ValidationReport(not violations, sr.is_algebra, sr.is_sigma_algebra, violations)


# ==========================================
# MEASURES
# ==========================================

@dataclass(frozen=True)
class Tabulated:
    """
    A raw set function on an explicit family, one value per member in family
    order. Only mu(∅) = 0 is enforced; additivity is what the checks test.
    """

    semiring: ExplicitSemiring
    values: tuple[ExtReal, ...]

    def __post_init__(self):
        values = tuple(self.values)
        if len(values) != len(self.semiring.family):
            raise InvalidDescriptor(
                f"❌ {len(self.semiring.family)} family members but {len(values)} values."
            )
        empty = FiniteSet()
        if self.semiring.contains(empty) and not values[self.semiring.index_of(empty)].is_zero:
            raise InvalidDescriptor("❌ A set function must give ∅ the value 0.")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, semiring: ExplicitSemiring, mapping: Mapping[FiniteSet, ExtReal]) -> Tabulated:
        missing = [m for m in semiring.family if m not in mapping and not m.is_empty]
        if missing:
            raise InvalidDescriptor(f"❌ No value assigned to {missing[0]}.")
        return cls(semiring, tuple(mapping.get(m, ZERO) for m in semiring.family))

    def evaluate(self, a: SetExpr) -> ExtReal:
        return self.values[self.semiring.index_of(a)]

    def with_value(self, index: int, value: ExtReal) -> Tabulated:
        values = list(self.values)
        values[index] = value
        return Tabulated(self.semiring, tuple(values))

    def to_json(self) -> dict:
        return {"tabulated": [{"set": m.to_json(), "value": str(v)} for m, v in zip(self.semiring.family, self.values)]}


@dataclass(frozen=True)
class PointMass:
    """Weighted points on a finite universe; the semiring is the power set."""

    universe: FiniteUniverse
    weights: tuple[ExtReal, ...]

    def __post_init__(self):
        weights = tuple(self.weights)
        if len(weights) != self.universe.size:
            raise InvalidDescriptor(f"❌ Expected {self.universe.size} weights, got {len(weights)}.")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def counting(cls, universe: FiniteUniverse) -> PointMass:
        return cls(universe, tuple(ExtReal(1) for _ in universe.points()))

    @property
    def semiring(self) -> PowerSetSemiring:
        return PowerSetSemiring(self.universe)

    def evaluate(self, a: SetExpr) -> ExtReal:
        if not self.universe.owns(a):
            raise NotInDomain(f"❌ {a} is not a subset of the {self.universe.size}-point universe.")
        return total(self.weights[p] for p in a)

    def to_json(self) -> dict:
        return {"point_mass": [str(w) for w in self.weights]}


@dataclass(frozen=True)
class Length:
    """Lebesgue length on half-open rational intervals."""

    @property
    def semiring(self) -> IntervalSemiring:
        return IntervalSemiring()

    def evaluate(self, a: SetExpr) -> ExtReal:
        if not isinstance(a, IntervalUnion):
            raise NotInDomain(f"❌ Length measures interval unions, not {type(a).__name__}.")
        return ExtReal(a.length)

    def to_json(self) -> str:
        return "length"


MeasureDesc = Union[Tabulated, PointMass, Length]


def measure_eval(m: MeasureDesc, a: SetExpr) -> ExtReal:
    return m.evaluate(a)


def is_additive(m: MeasureDesc) -> bool:
    """True for the measures whose outer measure is their own additive extension."""
    return isinstance(m, PointMass | Length)


def check_finite_additivity(m: MeasureDesc, whole: SetExpr, parts: list[SetExpr]) -> CheckReport:
    """
    Compares mu(whole) with the sum of mu over a finite disjoint decomposition.

    Raises:
        PreconditionFailed: the parts overlap or do not union to `whole`.
    """
    for (i, a), (j, b) in combinations(enumerate(parts), 2):
        if not is_disjoint(a, b):
            raise PreconditionFailed(
                f"❌ Parts {i} and {j} overlap in {set_intersect(a, b)}.",
                {"left": i, "right": j},
            )
    covered = union_all(parts, set_difference(whole, whole))
    if covered != whole:
        raise PreconditionFailed(f"❌ The parts union to {covered}, not {whole}.")

    lhs = m.evaluate(whole)
    rhs = total(m.evaluate(p) for p in parts)
    return CheckReport(
        check="finite_additivity",
        passed=lhs == rhs,
        lhs=lhs,
        rhs=rhs,
        details={"whole": whole.to_json(), "parts": [p.to_json() for p in parts]},
    )


# ==========================================
# MEASURE SPACES
# ==========================================

@dataclass(frozen=True)
class MeasureSpace:
    """A universe, a semiring on it, a set function on the semiring and an optional σ-finiteness witness."""

    universe: Universe
    semiring: SemiringDesc
    measure: MeasureDesc
    sigma_finite_witness: tuple[SetExpr, ...] | None = None

    def __post_init__(self):
        if self.semiring.universe != self.universe:
            raise InvalidDescriptor("❌ The semiring lives on a different universe.")
        if self.measure.semiring != self.semiring:
            raise InvalidDescriptor("❌ The measure is defined on a different semiring.")
        if self.sigma_finite_witness is None:
            return
        if isinstance(self.universe, IntervalUniverse):
            raise InvalidDescriptor("❌ Interval spaces are σ-finite by unit intervals; omit the witness.")
        pieces = tuple(self.sigma_finite_witness)
        object.__setattr__(self, "sigma_finite_witness", pieces)
        for piece in pieces:
            if not self.semiring.contains(piece):
                raise InvalidDescriptor(f"❌ σ-finite piece {piece} is not a semiring member.")
            if self.measure.evaluate(piece).is_infinite:
                raise InvalidDescriptor(f"❌ σ-finite piece {piece} has infinite measure.")
        if union_all(pieces, self.universe.empty()) != self.universe.full():
            raise InvalidDescriptor("❌ The σ-finite pieces do not cover the universe.")

    @property
    def is_finite_universe(self) -> bool:
        return isinstance(self.universe, FiniteUniverse)

    def empty(self) -> SetExpr:
        return self.universe.empty()

    def to_json(self) -> dict:
        payload = {
            "universe": self.universe.to_json(),
            "semiring": self.semiring.to_json(),
            "measure": self.measure.to_json(),
        }
        if self.sigma_finite_witness is not None:
            payload["sigma_finite"] = [piece.to_json() for piece in self.sigma_finite_witness]
        return payload


def counting_space(size: int) -> MeasureSpace:
    universe = FiniteUniverse(size)
    measure = PointMass.counting(universe)
    return MeasureSpace(universe, measure.semiring, measure)


def point_mass_space(weights: Iterable[ExtReal | int | Fraction]) -> MeasureSpace:
    values = tuple(w if isinstance(w, ExtReal) else ExtReal(w) for w in weights)
    universe = FiniteUniverse(len(values))
    measure = PointMass(universe, values)
    return MeasureSpace(universe, measure.semiring, measure)


def tabulated_space(
    size: int,
    assignments: Mapping[FiniteSet, ExtReal] | Iterable[tuple[FiniteSet, ExtReal]],
    sigma_finite_witness: tuple[SetExpr, ...] | None = None,
) -> MeasureSpace:
    """Builds an explicit-family space; ∅ is added with value 0 when absent."""
    pairs = list(assignments.items()) if isinstance(assignments, Mapping) else list(assignments)
    if not any(s.is_empty for s, _ in pairs):
        pairs.insert(0, (FiniteSet(), ZERO))
    universe = FiniteUniverse(size)
    semiring = ExplicitSemiring(universe, tuple(s for s, _ in pairs))
    measure = Tabulated(semiring, tuple(v if isinstance(v, ExtReal) else ExtReal(v) for _, v in pairs))
    return MeasureSpace(universe, semiring, measure, sigma_finite_witness)


def length_space() -> MeasureSpace:
    return MeasureSpace(IntervalUniverse(), IntervalSemiring(), Length())


def materialized(space: MeasureSpace) -> MeasureSpace:
    """Rewrites a point-mass space as a Tabulated measure over the explicit power set."""
    if not isinstance(space.measure, PointMass):
        return space
    semiring = space.semiring.materialize()
    measure = Tabulated(semiring, tuple(space.measure.evaluate(s) for s in semiring.family))
    return MeasureSpace(space.universe, semiring, measure, space.sigma_finite_witness)


def find_sigma_finite_witness(space: MeasureSpace) -> tuple[SetExpr, ...] | None:
    """
    Looks for finitely many finite-measure semiring members covering a finite
    universe, choosing for each uncovered point the first suitable member.
    Returns None when some point lies in no finite-measure member.
    """
    if not space.is_finite_universe:
        return None
    if space.sigma_finite_witness is not None:
        return space.sigma_finite_witness
    if isinstance(space.measure, PointMass):
        singletons = [FiniteSet.of(p) for p in space.universe.points()]
        if any(space.measure.evaluate(s).is_infinite for s in singletons):
            return None
        return tuple(singletons)

    finite_members = [m for m in space.semiring.family if space.measure.evaluate(m).is_finite and not m.is_empty]
    pieces: list[FiniteSet] = []
    covered = 0
    for point in space.universe.points():
        if covered >> point & 1:
            continue
        for member in finite_members:
            if point in member:
                pieces.append(member)
                covered |= member.mask
                break
        else:
            return None
    return tuple(pieces)


def is_sigma_finite(space: MeasureSpace) -> bool:
    if isinstance(space.measure, Length):
        return True
    return find_sigma_finite_witness(space) is not None
