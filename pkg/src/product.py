"""
Rectangles, product measures, sections and superlevel sets on X × Y.

A subset D of X × Y is always presented as the union of a RectFamily: finitely
many rectangles plus, optionally, a dyadic staircase tail whose countably many
pieces are described by a closed form.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence, Union

from src.errors import InvalidDescriptor, NotInDomain, PreconditionFailed, UniverseMismatch
from src.exact_arith import ExtReal, mul, total
from src.outer import Exactness, OuterValue, outer_measure
from src.spaces import (
    ExplicitSemiring,
    FiniteSet,
    FiniteUniverse,
    IntervalUnion,
    MeasureDesc,
    MeasureSpace,
    PointMass,
    SemiringDesc,
    SetExpr,
    Tabulated,
    Universe,
    is_additive,
    is_disjoint,
    semiring_difference,
    set_difference,
    set_intersect,
    union_all,
)

logger = logging.getLogger(__name__)

Point = Union[int, Fraction]


@dataclass(frozen=True)
class Rect:
    """A × B with A ⊆ X (the base) and B ⊆ Y (the side)."""

    base: SetExpr
    side: SetExpr

    @property
    def is_empty(self) -> bool:
        return self.base.is_empty or self.side.is_empty

    def contains(self, x: Point, y: Point) -> bool:
        return x in self.base and y in self.side

    def check_in(self, semiring_x: SemiringDesc, semiring_y: SemiringDesc) -> None:
        if not semiring_x.contains(self.base):
            raise NotInDomain(f"❌ Base {self.base} is not in Σ_X.")
        if not semiring_y.contains(self.side):
            raise NotInDomain(f"❌ Side {self.side} is not in Σ_Y.")

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "side": self.side.to_json()}

    def __str__(self) -> str:
        return f"{self.base} × {self.side}"


def rect_intersect(a: Rect, b: Rect) -> Rect:
    return Rect(set_intersect(a.base, b.base), set_intersect(a.side, b.side))


def rects_disjoint(a: Rect, b: Rect) -> bool:
    return is_disjoint(a.base, b.base) or is_disjoint(a.side, b.side)


@lru_cache(maxsize=1024)
def _overlapping_pairs(members: tuple[Rect, ...]) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for (i, a), (j, b) in combinations(enumerate(members), 2) if not rects_disjoint(a, b))


@dataclass(frozen=True)
class DyadicTail:
    """
    The staircase {S_n × fixed} (axis="base") or {fixed × S_n} (axis="side")
    with S_n = [lo + w(1 - 2^-n), lo + w(1 - 2^-(n+1))), w = hi - lo, n >= 0.
    The pieces are pairwise disjoint and their union is [lo, hi).
    """

    axis: str
    fixed: SetExpr
    lo: Fraction = Fraction(0)
    hi: Fraction = Fraction(1)

    def __post_init__(self):
        if self.axis not in ("base", "side"):
            raise InvalidDescriptor(f"❌ Tail axis must be 'base' or 'side', got {self.axis!r}.")
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo >= hi:
            raise InvalidDescriptor(f"❌ Tail span [{lo}, {hi}) is empty.")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def _mark(self, n: int) -> Fraction:
        return self.lo + (self.hi - self.lo) * (1 - Fraction(1, 2 ** n))

    def span(self, n: int) -> IntervalUnion:
        return IntervalUnion.interval(self._mark(n), self._mark(n + 1))

    def piece(self, n: int) -> Rect:
        if self.axis == "base":
            return Rect(self.span(n), self.fixed)
        return Rect(self.fixed, self.span(n))

    def pieces(self, depth: int) -> tuple[Rect, ...]:
        """Pieces 0..depth inclusive."""
        return tuple(self.piece(n) for n in range(depth + 1))

    @property
    def union_rect(self) -> Rect:
        whole = IntervalUnion.interval(self.lo, self.hi)
        return Rect(whole, self.fixed) if self.axis == "base" else Rect(self.fixed, whole)

    def locate(self, point: Point) -> int | None:
        """Index of the piece whose staircase span holds `point`."""
        x = Fraction(point)
        if not self.lo <= x < self.hi:
            return None
        n = 0
        while x >= self._mark(n + 1):
            n += 1
        return n

    def partial_measure(self, depth: int, fixed_value: ExtReal) -> ExtReal:
        """Closed form for pieces 0..depth: w(1 - 2^-(depth+1)) * mu(fixed)."""
        spans = ExtReal((self.hi - self.lo) * (1 - Fraction(1, 2 ** (depth + 1))))
        return mul(spans, fixed_value)

    def to_json(self) -> dict:
        return {
            "kind": "dyadic",
            "axis": self.axis,
            "fixed": self.fixed.to_json(),
            "lo": f"{self.lo.numerator}/{self.lo.denominator}",
            "hi": f"{self.hi.numerator}/{self.hi.denominator}",
        }


@dataclass(frozen=True)
class RectFamily:
    """Indexed rectangles; tail piece n (if any) has index len(rects) + n."""

    rects: tuple[Rect, ...] = ()
    tail: DyadicTail | None = None

    def __post_init__(self):
        object.__setattr__(self, "rects", tuple(self.rects))

    @property
    def is_finite(self) -> bool:
        return self.tail is None

    def truncated(self, depth: int) -> tuple[Rect, ...]:
        if self.tail is None:
            return self.rects
        return self.rects + self.tail.pieces(depth)

    def symbolic_members(self) -> tuple[Rect, ...]:
        """The finite rectangles plus the tail's union as a single rectangle."""
        if self.tail is None:
            return self.rects
        return self.rects + (self.tail.union_rect,)

    def overlapping_pairs(self) -> list[tuple[int, int]]:
        """Index pairs whose product sets meet (the tail counts as one member)."""
        return list(_overlapping_pairs(self.symbolic_members()))

    def check_in(self, semiring_x: SemiringDesc, semiring_y: SemiringDesc) -> None:
        for rect in self.rects:
            rect.check_in(semiring_x, semiring_y)
        if self.tail is not None:
            self.tail.piece(0).check_in(semiring_x, semiring_y)

    def to_json(self) -> dict:
        payload = {"rects": [r.to_json() for r in self.rects]}
        if self.tail is not None:
            payload["tail"] = self.tail.to_json()
        return payload


@dataclass(frozen=True)
class ProductSet:
    """D ⊆ X × Y as the union of a rectangle family."""

    family: RectFamily
    universe_x: Universe
    universe_y: Universe

    def contains(self, x: Point, y: Point) -> bool:
        return any(r.contains(x, y) for r in self.family.symbolic_members())

    @classmethod
    def from_points(cls, pairs: Iterable[tuple[int, int]], universe_x: FiniteUniverse, universe_y: FiniteUniverse) -> ProductSet:
        """Groups the pairs by x into rectangles {x} × D^x."""
        rows: dict[int, set[int]] = {}
        for x, y in pairs:
            rows.setdefault(x, set()).add(y)
        rects = tuple(Rect(FiniteSet.of(x), FiniteSet(tuple(ys))) for x, ys in sorted(rows.items()))
        return cls(RectFamily(rects), universe_x, universe_y)

    @classmethod
    def of_family(cls, family: RectFamily, space_x: MeasureSpace, space_y: MeasureSpace) -> ProductSet:
        return cls(family, space_x.universe, space_y.universe)

    def points(self) -> list[tuple[int, int]]:
        if not isinstance(self.universe_x, FiniteUniverse) or not isinstance(self.universe_y, FiniteUniverse):
            raise UniverseMismatch("❌ Only products of finite universes can list their points.")
        return [(x, y) for x in self.universe_x.points() for y in self.universe_y.points() if self.contains(x, y)]

    def complement(self) -> ProductSet:
        inside = set(self.points())
        outside = [(x, y) for x in self.universe_x.points() for y in self.universe_y.points() if (x, y) not in inside]
        return ProductSet.from_points(outside, self.universe_x, self.universe_y)

    def to_json(self) -> dict:
        return self.family.to_json()


# ==========================================
# RECTANGLE ALGEBRA
# ==========================================

def _split(a: SetExpr, b: SetExpr, semiring: SemiringDesc | None) -> list[SetExpr]:
    """a minus b as disjoint pieces: semiring members when a semiring is given."""
    if semiring is not None:
        return semiring_difference(a, b, semiring)
    rest = set_difference(a, b)
    if rest.is_empty:
        return []
    return rest.pieces() if isinstance(rest, IntervalUnion) else [rest]


def rect_difference(
    p: Rect,
    q: Rect,
    semiring_x: SemiringDesc | None = None,
    semiring_y: SemiringDesc | None = None,
) -> list[Rect]:
    """
    (A1 × B1) ∖ (A2 × B2) = (A1 ∖ A2) × B1  ⊎  (A1 ∩ A2) × (B1 ∖ B2),
    each difference expanded into disjoint semiring members.
    """
    if rects_disjoint(p, q):
        return [p]
    pieces = [Rect(a, p.side) for a in _split(p.base, q.base, semiring_x)]
    meet = set_intersect(p.base, q.base)
    pieces += [Rect(meet, b) for b in _split(p.side, q.side, semiring_y)]
    return [r for r in pieces if not r.is_empty]


def rect_disjointify(
    family: Sequence[Rect],
    semiring_x: SemiringDesc | None = None,
    semiring_y: SemiringDesc | None = None,
) -> RectFamily:
    """
    A pairwise disjoint family with the same union: each rectangle in turn
    loses whatever earlier output already covers. Disjoint input comes back
    unchanged and in order.

    Raises:
        NoDecomposition: a semiring difference has no disjoint decomposition.
    """
    result: list[Rect] = []
    for rect in family:
        if rect.is_empty:
            continue
        pending = [rect]
        for kept in result:
            pending = [piece for p in pending for piece in rect_difference(p, kept, semiring_x, semiring_y)]
            if not pending:
                break
        result.extend(pending)
    return RectFamily(tuple(result))


def covers(members: Sequence[Rect], rects: Sequence[Rect]) -> bool:
    """Exact test of  ∪ rects ⊆ ∪ members, memoized per argument pair."""
    return _covers(tuple(members), tuple(rects))


@lru_cache(maxsize=1024)
def _covers(members: tuple[Rect, ...], rects: tuple[Rect, ...]) -> bool:
    for rect in rects:
        rest = [rect] if not rect.is_empty else []
        for member in members:
            rest = [piece for r in rest for piece in rect_difference(r, member)]
            if not rest:
                break
        if rest:
            return False
    return True


def product_measure(mx: MeasureDesc, my: MeasureDesc, r: Rect) -> ExtReal:
    """mu_X(base) * mu_Y(side) with 0 * inf = 0."""
    return mul(mx.evaluate(r.base), my.evaluate(r.side))


# ==========================================
# SECTIONS AND SUPERLEVEL SETS
# ==========================================

def section(d: ProductSet, x: Point) -> SetExpr:
    """D^x = {y : (x, y) ∈ D}."""
    sides = [r.side for r in d.family.symbolic_members() if x in r.base]
    return union_all(sides, d.universe_y.empty())


def partition_cells(bases: Iterable[SetExpr]) -> list[tuple[Fraction, Fraction]]:
    """
    Consecutive endpoint cells [e_i, e_i+1) of interval bases. Every base is
    either a superset of a cell or disjoint from it, so sections are constant
    on cells and vanish outside them.
    """
    marks = sorted({e for base in bases for e in base.endpoints})
    return list(zip(marks, marks[1:]))


def superlevel(d: ProductSet, space_y: MeasureSpace, r: ExtReal) -> SetExpr:
    """
    D^{>r} = {x : mu*_Y(D^x) > r}, strict inequality.

    Finite X is scanned point by point; on the interval line the sections are
    evaluated once per endpoint cell and the cells above r are joined.
    """
    if r.is_infinite or r.is_zero:
        raise PreconditionFailed(f"❌ The level r must be finite and positive, got {r}.")
    if isinstance(d.universe_x, FiniteUniverse):
        chosen = [x for x in d.universe_x.points() if outer_measure(space_y, section(d, x)).value > r]
        return FiniteSet(tuple(chosen))
    cells = partition_cells(m.base for m in d.family.symbolic_members())
    kept = [(a, b) for a, b in cells if outer_measure(space_y, section(d, a)).value > r]
    return IntervalUnion(tuple(kept))


def section_values(d: ProductSet, space_y: MeasureSpace) -> list[ExtReal]:
    """mu*_Y(D^x) for every x in finite X, or for every endpoint cell on the line."""
    if isinstance(d.universe_x, FiniteUniverse):
        reps = list(d.universe_x.points())
    else:
        reps = [a for a, _ in partition_cells(m.base for m in d.family.symbolic_members())]
    return [outer_measure(space_y, section(d, x)).value for x in reps]


# ==========================================
# PRODUCT OUTER MEASURE
# ==========================================

@dataclass(frozen=True)
class ProductStructure:
    """
    The finite product X × Y with point (x, y) encoded as x * |Y| + y, and the
    measure space generated by the product semiring Σ_X ⊗ Σ_Y.
    """

    space: MeasureSpace
    size_x: int
    size_y: int
    rect_of: dict = field(default_factory=dict, compare=False, hash=False)

    def encode(self, x: int, y: int) -> int:
        return x * self.size_y + y

    def decode(self, point: int) -> tuple[int, int]:
        return divmod(point, self.size_y)

    def encode_rect(self, rect: Rect) -> FiniteSet:
        return FiniteSet(tuple(self.encode(x, y) for x in rect.base for y in rect.side))

    def encode_set(self, d: ProductSet) -> FiniteSet:
        return FiniteSet(tuple(self.encode(x, y) for x, y in d.points()))

    def decode_set(self, s: FiniteSet, universe_x: FiniteUniverse, universe_y: FiniteUniverse) -> ProductSet:
        return ProductSet.from_points((self.decode(p) for p in s), universe_x, universe_y)


def _explicit(space: MeasureSpace) -> ExplicitSemiring:
    semiring = space.semiring
    return semiring if isinstance(semiring, ExplicitSemiring) else semiring.materialize()


@lru_cache(maxsize=256)
def product_space(space_x: MeasureSpace, space_y: MeasureSpace) -> ProductStructure:
    """
    Builds the finite product. Two point masses multiply pointwise, which
    generates the same outer measure as the rectangles do; otherwise every
    rectangle A × B becomes a tabulated family member worth mu(A) * mu(B).
    """
    ux, uy = space_x.universe, space_y.universe
    if not isinstance(ux, FiniteUniverse) or not isinstance(uy, FiniteUniverse):
        raise UniverseMismatch("❌ The explicit product needs two finite universes.")
    universe = FiniteUniverse(ux.size * uy.size)

    if isinstance(space_x.measure, PointMass) and isinstance(space_y.measure, PointMass):
        weights = tuple(mul(wx, wy) for wx in space_x.measure.weights for wy in space_y.measure.weights)
        measure = PointMass(universe, weights)
        return ProductStructure(MeasureSpace(universe, measure.semiring, measure), ux.size, uy.size)

    def encode_rect(rect: Rect) -> FiniteSet:
        return FiniteSet(tuple(x * uy.size + y for x in rect.base for y in rect.side))

    members: dict[FiniteSet, ExtReal] = {FiniteSet(): ExtReal(0)}
    rect_of: dict[FiniteSet, Rect] = {}
    for a in _explicit(space_x).family:
        for b in _explicit(space_y).family:
            rect = Rect(a, b)
            encoded = encode_rect(rect)
            if encoded.is_empty:
                continue
            members[encoded] = product_measure(space_x.measure, space_y.measure, rect)
            rect_of[encoded] = rect
    semiring = ExplicitSemiring(universe, tuple(members))
    measure = Tabulated(semiring, tuple(members.values()))
    logger.debug("Product family has %d rectangles over %d points", len(members), universe.size)
    return ProductStructure(MeasureSpace(universe, semiring, measure), ux.size, uy.size, rect_of)


def product_outer_measure(space_x: MeasureSpace, space_y: MeasureSpace, d: ProductSet) -> OuterValue:
    """
    (mu_X × mu_Y)*(D), exactly.

    Finite products run the cover search over the product semiring. Over
    additive factors (point masses, length) a rectangle union is measured by
    disjointifying it and adding the product measures of the pieces.

    Raises:
        PreconditionFailed: neither route applies.
    """
    if space_x.is_finite_universe and space_y.is_finite_universe:
        structure = product_space(space_x, space_y)
        return outer_measure(structure.space, structure.encode_set(d))
    if is_additive(space_x.measure) and is_additive(space_y.measure):
        pieces = rect_disjointify(d.family.symbolic_members())
        value = total(product_measure(space_x.measure, space_y.measure, r) for r in pieces.rects)
        return OuterValue(value, None, Exactness.EXACT)
    raise PreconditionFailed("❌ (μ_X × μ_Y)* is only computed on finite products or additive factors.")

