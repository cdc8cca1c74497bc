from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import BudgetExceeded, NotACover, UniverseMismatch
from src.exact_arith import INF, ExtReal
from src.generators import gen_random_finite_space
from src.outer import (
    Cover,
    Exactness,
    attainable_values,
    caratheodory_measurable,
    check_outer_axioms,
    cover_bound,
    outer_measure,
    outer_measure_exhaustive,
)
from src.spaces import FiniteSet, IntervalUnion, counting_space, materialized, tabulated_space


@pytest.fixture
def expensive_pair():
    """{0,1} costs 5 on its own but 2 through its singletons."""
    return tabulated_space(2, {
        FiniteSet.of(0): ExtReal(1),
        FiniteSet.of(1): ExtReal(1),
        FiniteSet.of(0, 1): ExtReal(5),
    })


def test_counting_outer_measure_is_cardinality(counting3):
    result = outer_measure(counting3, FiniteSet.of(0, 2))
    assert result.value == ExtReal(2)
    assert result.exactness is Exactness.EXACT


def test_cheaper_cover_beats_the_member_value(expensive_pair):
    result = outer_measure(expensive_pair, FiniteSet.of(0, 1))
    assert result.value == ExtReal(2)
    assert result.witness_cover.pieces == (FiniteSet.of(0), FiniteSet.of(1))


def test_uncoverable_set_has_infinite_outer_measure():
    space = tabulated_space(2, {FiniteSet.of(0): ExtReal(1)})
    result = outer_measure(space, FiniteSet.of(1))
    assert result.value == INF
    assert result.witness_cover is None


def test_length_outer_measure_of_interval_union(line):
    target = IntervalUnion(((0, Fraction(1, 2)), (1, 2)))
    assert outer_measure(line, target).value == ExtReal(3, 2)


def test_outer_measure_of_empty_set_is_zero(expensive_pair):
    assert outer_measure(expensive_pair, FiniteSet()).value == ExtReal(0)


def test_target_from_another_universe(counting3):
    with pytest.raises(UniverseMismatch):
        outer_measure(counting3, FiniteSet.of(5))


def test_budget_exhaustion_raises_with_upper_bound(expensive_pair):
    with pytest.raises(BudgetExceeded) as info:
        outer_measure(expensive_pair, FiniteSet.of(0, 1), node_budget=1)
    assert info.value.best.exactness is Exactness.UPPER_BOUND


def test_budget_exhaustion_without_strict_mode(expensive_pair):
    result = outer_measure(expensive_pair, FiniteSet.of(0, 1), node_budget=1, strict=False)
    assert result.exactness is Exactness.UPPER_BOUND


def test_search_agrees_with_all_covers_oracle(block_space, expensive_pair):
    for space in (block_space, expensive_pair):
        for target in space.universe.subsets():
            assert outer_measure(space, target).value == outer_measure_exhaustive(space, target).value


def test_exhaustive_oracle_refuses_large_families():
    with pytest.raises(BudgetExceeded):
        outer_measure_exhaustive(counting_space(4), FiniteSet.of(0))


def test_cover_bound_sums_the_pieces(expensive_pair):
    cover = Cover((FiniteSet.of(0, 1),), FiniteSet.of(0))
    assert cover_bound(expensive_pair.measure, cover) == ExtReal(5)
    with pytest.raises(NotACover):
        cover_bound(expensive_pair.measure, Cover((FiniteSet.of(0),), FiniteSet.of(0, 1)))


def test_outer_axioms_hold_on_all_subsets(block_space):
    report = check_outer_axioms(block_space, list(block_space.universe.subsets()))
    assert report.passed
    assert report.details["checked"]["monotone"] > 0


def test_strict_domination_is_counted(expensive_pair):
    report = check_outer_axioms(expensive_pair, list(expensive_pair.universe.subsets()))
    assert report.passed
    assert report.details["strictly_dominated"] == 1


def test_union_of_blocks_is_measurable(block_space):
    assert caratheodory_measurable(block_space, FiniteSet.of(0, 1)).passed


def test_part_of_a_block_is_not_measurable(block_space):
    report = caratheodory_measurable(block_space, FiniteSet.of(0))
    assert not report.passed
    assert report.violations[0]["test_set"] == FiniteSet.of(0, 1)
    assert (report.lhs, report.rhs) == (ExtReal(1), ExtReal(2))
    assert report.details["tested"] == 4


def test_point_masses_split_every_set(counting3):
    assert caratheodory_measurable(counting3, FiniteSet.of(1)).details["method"] == "additive"
    report = caratheodory_measurable(counting3, FiniteSet.of(1), exhaustive=True)
    assert report.passed
    assert report.details["tested"] == 8


def test_measurability_budget():
    with pytest.raises(BudgetExceeded):
        caratheodory_measurable(counting_space(13), FiniteSet.of(0), exhaustive=True)


def test_attainable_values(counting3):
    assert attainable_values(counting3) == [ExtReal(0), ExtReal(1), ExtReal(2), ExtReal(3)]


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), data=st.data())
def test_outer_measure_is_below_every_cover(seed, data):
    space = materialized(gen_random_finite_space(seed))
    family = [m for m in space.semiring.family if not m.is_empty]
    target = data.draw(st.sampled_from(list(space.universe.subsets())))
    pieces = data.draw(st.lists(st.sampled_from(family), max_size=4))
    for point in target:
        if not any(point in piece for piece in pieces):
            pieces.append(next(m for m in family if point in m))
    cover = Cover(tuple(pieces), target)
    assert outer_measure(space, target).value <= cover_bound(space.measure, cover)
