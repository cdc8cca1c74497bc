"""
Seeded instance generators and corruptors.

Every generator takes an integer seed and draws only from its own
numpy Generator, so identical arguments give identical instances.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from src.errors import InvalidDescriptor
from src.exact_arith import ExtReal, INF
from src.outer import outer_measure
from src.product import DyadicTail, ProductSet, Rect, RectFamily, section_values, superlevel
from src.spaces import (
    ExplicitSemiring,
    FiniteSet,
    FiniteUniverse,
    IntervalUnion,
    MeasureSpace,
    SetExpr,
    Tabulated,
    length_space,
    materialized,
    point_mass_space,
    tabulated_space,
)

logger = logging.getLogger(__name__)

# --- CONFIGURATION ---
# Random cuts are k/d with d drawn from 2..MAX_DENOMINATOR.
MAX_DENOMINATOR = 64


class GenKind(Enum):
    GUILLOTINE_PARTITION = "guillotine_partition"
    RANDOM_FINITE_SPACE = "random_finite_space"
    RANDOM_FAMILY = "random_family"
    DYADIC_STAIRCASE = "dyadic_staircase"
    CORRUPTED_MEASURE = "corrupted_measure"
    RANDOM_RECT_FAMILY = "random_rect_family"


@dataclass(frozen=True)
class GenSpec:
    kind: GenKind
    seed: int
    pieces: int = 4
    size: int | None = None
    magnitude: ExtReal = ExtReal(1)
    max_denominator: int = MAX_DENOMINATOR


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def _child_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(2 ** 32))


def _weight(rng: np.random.Generator, upper: int = 2, positive: bool = False, max_denominator: int = 4) -> Fraction:
    """A rational in [0, upper] (or (0, upper]) with denominator at most max_denominator."""
    den = int(rng.integers(1, max(max_denominator, 1) + 1))
    low = 1 if positive else 0
    return Fraction(int(rng.integers(low, upper * den + 1)), den)


def _fraction_below_one(rng: np.random.Generator, max_denominator: int) -> Fraction:
    """A rational in (0, 1) with denominator at most max_denominator."""
    den = int(rng.integers(2, max(max_denominator, 2) + 1))
    return Fraction(int(rng.integers(1, den)), den)


# ==========================================
# GUILLOTINE PARTITIONS
# ==========================================

def _random_cut(rng: np.random.Generator, a: Fraction, b: Fraction, max_denominator: int) -> Fraction:
    """A rational strictly inside (a, b), k/d with d <= max_denominator when one exists."""
    den = int(rng.integers(2, max(max_denominator, 2) + 1))
    lo = math.floor(a * den) + 1
    hi = math.ceil(b * den) - 1
    if lo > hi:
        return (a + b) / 2
    return Fraction(int(rng.integers(lo, hi + 1)), den)


def _split_set(rng: np.random.Generator, a: SetExpr, max_denominator: int) -> tuple[SetExpr, SetExpr] | None:
    if isinstance(a, FiniteSet):
        if len(a) < 2:
            return None
        k = int(rng.integers(1, len(a)))
        return FiniteSet(a.members[:k]), FiniteSet(a.members[k:])
    if a.is_empty:
        return None
    if len(a.intervals) > 1:
        return IntervalUnion(a.intervals[:1]), IntervalUnion(a.intervals[1:])
    lo, hi = a.intervals[0]
    cut = _random_cut(rng, lo, hi, max_denominator)
    return IntervalUnion.interval(lo, cut), IntervalUnion.interval(cut, hi)


def _split_rect(rng: np.random.Generator, rect: Rect, max_denominator: int) -> list[Rect] | None:
    for axis in rng.permutation(2):
        if axis == 0:
            halves = _split_set(rng, rect.base, max_denominator)
            if halves:
                return [Rect(halves[0], rect.side), Rect(halves[1], rect.side)]
        else:
            halves = _split_set(rng, rect.side, max_denominator)
            if halves:
                return [Rect(rect.base, halves[0]), Rect(rect.base, halves[1])]
    return None


def gen_guillotine(seed: int, pieces: int, whole: Rect, max_denominator: int = MAX_DENOMINATOR) -> RectFamily:
    """
    Splits `whole` recursively along random axis-aligned cuts until there are
    `pieces` rectangles. Interval sides are cut at random k/d, finite sides at
    a random position in their sorted points. On finite sides the count stops
    early once every piece is a single cell.
    """
    if pieces < 1:
        raise InvalidDescriptor(f"❌ A partition needs at least one piece, got {pieces}.")
    rng = _rng(seed)
    leaves = [whole]
    while len(leaves) < pieces:
        for index in rng.permutation(len(leaves)):
            halves = _split_rect(rng, leaves[index], max_denominator)
            if halves:
                leaves[index:index + 1] = halves
                break
        else:
            logger.debug("Guillotine stopped at %d pieces: nothing left to split", len(leaves))
            break
    return RectFamily(tuple(leaves))


# ==========================================
# SPACES AND FAMILIES
# ==========================================

def _blocks(rng: np.random.Generator, size: int, count: int) -> list[FiniteSet]:
    """Random partition of 0..size-1 into `count` consecutive blocks."""
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, size), size=count - 1, replace=False)) if count > 1 else []
    edges = [0] + cuts + [size]
    return [FiniteSet(tuple(range(a, b))) for a, b in zip(edges, edges[1:])]


def _runs(blocks: list[FiniteSet]) -> list[FiniteSet]:
    """Unions of consecutive blocks: the interval semiring on the block line."""
    return [FiniteSet(tuple(p for block in blocks[i:j] for p in block)) for i in range(len(blocks)) for j in range(i + 1, len(blocks) + 1)]


def gen_random_finite_space(
    seed: int,
    size: int | None = None,
    max_denominator: int = MAX_DENOMINATOR,
    min_blocks: int = 1,
) -> MeasureSpace:
    """
    A genuine measure on a small finite universe: point masses (up to 3
    points), or block weights tabulated on all runs of consecutive blocks.
    Families stay within the exhaustive cover oracle's size.
    """
    rng = _rng(seed)
    size = size or int(rng.integers(1, 5))
    if size <= 3 and rng.integers(2) == 0:
        return point_mass_space(_weight(rng, max_denominator=max_denominator) for _ in range(size))

    count = int(rng.integers(min(max(min_blocks, 1), size), size + 1))
    blocks = _blocks(rng, size, count)
    weights = [_weight(rng, max_denominator=max_denominator) for _ in blocks]
    pairs = []
    for run in _runs(blocks):
        value = sum((w for block, w in zip(blocks, weights) if block.members[0] in run), Fraction(0))
        pairs.append((run, ExtReal(value)))
    return tabulated_space(size, pairs)


def gen_random_family(seed: int, size: int | None = None) -> ExplicitSemiring:
    """
    An explicit family that is a semiring by construction (power set, block
    runs or block unions), then mutated half of the time: a member dropped,
    a random subset added, or ∅ removed.
    """
    rng = _rng(seed)
    size = size or int(rng.integers(1, 5))
    universe = FiniteUniverse(size)
    shape = int(rng.integers(3))
    if shape == 0:
        members = list(universe.subsets())
    else:
        blocks = _blocks(rng, size, int(rng.integers(1, size + 1)))
        if shape == 1:
            members = [FiniteSet()] + _runs(blocks)
        else:
            members = [FiniteSet(tuple(p for i, b in enumerate(blocks) if mask >> i & 1 for p in b)) for mask in range(1 << len(blocks))]

    mutation = int(rng.integers(6))
    if mutation == 1 and members:
        members.pop(int(rng.integers(len(members))))
    elif mutation == 2:
        extra = FiniteSet.from_mask(int(rng.integers(1 << size)))
        if extra not in members:
            members.insert(int(rng.integers(len(members) + 1)), extra)
    elif mutation == 3:
        members = [m for m in members if not m.is_empty]
    return ExplicitSemiring(universe, tuple(members))


def gen_dyadic_staircase(seed: int) -> tuple[Rect, RectFamily]:
    """
    The unit square at a random offset, presented as a dyadic staircase along a
    random axis. Truncation through depth N covers 1 - 2^-(N+1) of it.
    """
    rng = _rng(seed)
    axis = ("base", "side")[int(rng.integers(2))]
    offset = int(rng.integers(0, 4))
    tail = DyadicTail(axis, IntervalUnion.interval(0, 1), Fraction(offset), Fraction(offset + 1))
    return tail.union_rect, RectFamily((), tail)


@dataclass(frozen=True)
class WitnessInstance:
    space_x: MeasureSpace
    space_y: MeasureSpace
    d: ProductSet
    cover: RectFamily
    r: ExtReal
    s: ExtReal

    def to_json(self) -> dict:
        return {
            "x": self.space_x.to_json(),
            "y": self.space_y.to_json(),
            "d": self.d.to_json(),
            "cover": self.cover.to_json(),
            "r": str(self.r),
            "s": str(self.s),
        }


def gen_random_rect_family(seed: int, pieces: int = 8, max_denominator: int = MAX_DENOMINATOR) -> WitnessInstance:
    """
    An extraction instance that satisfies every precondition: a guillotine
    cover of the whole product, D the union of a random subfamily, r below
    the largest section value and s below mu*_X(D^{>r}).
    """
    rng = _rng(seed)
    if rng.integers(2) == 0:
        space_x = space_y = length_space()
        whole = Rect(IntervalUnion.interval(0, 1), IntervalUnion.interval(0, 1))
    else:
        space_x = point_mass_space(_weight(rng, positive=True) for _ in range(int(rng.integers(1, 5))))
        space_y = point_mass_space(_weight(rng, positive=True) for _ in range(int(rng.integers(1, 5))))
        whole = Rect(space_x.universe.full(), space_y.universe.full())

    cover = gen_guillotine(_child_seed(rng), pieces, whole, max_denominator)
    chosen = tuple(rect for rect in cover.rects if rng.random() < 0.6) or cover.rects[:1]
    d = ProductSet(RectFamily(chosen), space_x.universe, space_y.universe)

    top = max(section_values(d, space_y))
    r = ExtReal(top.fraction * _fraction_below_one(rng, max_denominator))
    level_outer = outer_measure(space_x, superlevel(d, space_y, r)).value
    s = ExtReal(level_outer.fraction * _fraction_below_one(rng, max_denominator))
    return WitnessInstance(space_x, space_y, d, cover, r, s)


# ==========================================
# CORRUPTION
# ==========================================

def gen_corrupted(seed: int, base: MeasureSpace, magnitude: ExtReal) -> MeasureSpace:
    """
    Perturbs one value of a finite set function by ±magnitude, floored at 0.

    Point masses are first written out as a table over the power set, since a
    changed point weight is just another measure. The direction is chosen so
    the value really changes; μ(∅) is never touched.
    """
    if magnitude.is_zero:
        return base
    space = materialized(base)
    if not isinstance(space.measure, Tabulated):
        raise InvalidDescriptor("❌ Only tabulated or point-mass measures can be corrupted.")
    measure = space.measure
    candidates = [
        i for i, member in enumerate(space.semiring.family)
        if not member.is_empty and measure.values[i].is_finite
    ]
    if not candidates:
        raise InvalidDescriptor("❌ No finite non-empty assignment to perturb.")

    rng = _rng(seed)
    index = candidates[int(rng.integers(len(candidates)))]
    current = measure.values[index]
    lower = bool(rng.integers(2)) and not current.is_zero
    if magnitude.is_infinite:
        changed = INF
    elif lower:
        changed = ExtReal(max(current.fraction - magnitude.fraction, Fraction(0)))
    else:
        changed = current + magnitude
    logger.debug("Corrupted %s: %s -> %s", space.semiring.family[index], current, changed)
    return MeasureSpace(space.universe, space.semiring, measure.with_value(index, changed))


def generate(spec: GenSpec):
    """Dispatches a GenSpec to its generator."""
    if spec.kind is GenKind.GUILLOTINE_PARTITION:
        whole = Rect(IntervalUnion.interval(0, 1), IntervalUnion.interval(0, 1))
        family = gen_guillotine(spec.seed, spec.pieces, whole, spec.max_denominator)
        return {"whole": whole, "parts": family}
    if spec.kind is GenKind.RANDOM_FINITE_SPACE:
        return gen_random_finite_space(spec.seed, spec.size, spec.max_denominator)
    if spec.kind is GenKind.RANDOM_FAMILY:
        return gen_random_family(spec.seed, spec.size)
    if spec.kind is GenKind.DYADIC_STAIRCASE:
        whole, parts = gen_dyadic_staircase(spec.seed)
        return {"whole": whole, "parts": parts}
    if spec.kind is GenKind.CORRUPTED_MEASURE:
        base = gen_random_finite_space(spec.seed, spec.size or 3, spec.max_denominator, min_blocks=2)
        return {"base": base, "corrupted": gen_corrupted(spec.seed, base, spec.magnitude)}
    return gen_random_rect_family(spec.seed, spec.pieces, spec.max_denominator)
