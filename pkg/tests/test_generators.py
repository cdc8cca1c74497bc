from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import InvalidDescriptor
from src.exact_arith import ExtReal, total
from src.generators import (
    GenKind,
    GenSpec,
    gen_corrupted,
    gen_dyadic_staircase,
    gen_guillotine,
    gen_random_family,
    gen_random_finite_space,
    gen_random_rect_family,
    generate,
)
from src.product import Rect, covers, product_measure
from src.spaces import FiniteSet, IntervalUnion, Tabulated, counting_space, length_space, materialized, validate_semiring
from src.theorem import extract_witness, recheck_witness


def test_one_piece_is_the_whole(unit_square):
    assert gen_guillotine(7, 1, unit_square).rects == (unit_square,)


def test_zero_pieces_is_invalid(unit_square):
    with pytest.raises(InvalidDescriptor):
        gen_guillotine(7, 0, unit_square)


def test_guillotine_is_deterministic(unit_square):
    assert gen_guillotine(11, 9, unit_square) == gen_guillotine(11, 9, unit_square)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), pieces=st.integers(1, 16))
def test_guillotine_partitions_the_square(seed, pieces):
    square = Rect(IntervalUnion.interval(0, 1), IntervalUnion.interval(0, 1))
    lebesgue = length_space().measure
    family = gen_guillotine(seed, pieces, square)
    assert len(family.rects) == pieces
    assert family.overlapping_pairs() == []
    assert covers(family.rects, [square]) and covers([square], family.rects)
    assert total(product_measure(lebesgue, lebesgue, r) for r in family.rects) == ExtReal(1)


def test_finite_cells_stop_the_split():
    whole = Rect(FiniteSet.of(0, 1), FiniteSet.of(0, 1))
    family = gen_guillotine(5, 10, whole)
    assert len(family.rects) == 4
    assert all(len(r.base) == 1 and len(r.side) == 1 for r in family.rects)


def test_random_finite_spaces_have_small_valid_families():
    for seed in range(20):
        space = materialized(gen_random_finite_space(seed))
        assert len(space.semiring.family) <= 16
        assert validate_semiring(space.semiring).valid


@pytest.mark.parametrize("seed", range(12))
def test_masses_respect_the_denominator_bound(seed):
    whole_numbers = materialized(gen_random_finite_space(seed, max_denominator=1))
    assert all(v.denominator == 1 for v in whole_numbers.measure.values)
    halves = materialized(gen_random_finite_space(seed, max_denominator=2))
    assert all(v.denominator in (1, 2) for v in halves.measure.values)


def test_random_families_are_sometimes_broken():
    verdicts = {validate_semiring(gen_random_family(seed)).valid for seed in range(60)}
    assert verdicts == {True, False}


def test_staircase_shape():
    whole, parts = gen_dyadic_staircase(4)
    assert parts.rects == ()
    assert parts.tail.union_rect == whole
    assert parts.tail.hi - parts.tail.lo == 1


def test_zero_magnitude_leaves_the_measure_alone(counting3):
    assert gen_corrupted(1, counting3, ExtReal(0)) is counting3


@pytest.mark.parametrize("seed", range(8))
def test_corruption_changes_exactly_one_value(counting3, seed):
    corrupted = gen_corrupted(seed, counting3, ExtReal(1, 2))
    assert isinstance(corrupted.measure, Tabulated)
    before = materialized(counting3).measure.values
    changed = [i for i, (a, b) in enumerate(zip(before, corrupted.measure.values)) if a != b]
    assert len(changed) == 1
    assert not corrupted.semiring.family[changed[0]].is_empty


@pytest.mark.parametrize("seed", range(21))
def test_rect_family_instances_admit_witnesses(seed):
    instance = gen_random_rect_family(seed)
    witness = extract_witness(instance.space_x, instance.space_y, instance.d, instance.cover, instance.r, instance.s)
    assert recheck_witness(witness.to_json()).passed


def test_generate_dispatches_on_kind():
    result = generate(GenSpec(GenKind.CORRUPTED_MEASURE, seed=2, magnitude=ExtReal(1)))
    assert set(result) == {"base", "corrupted"}
    assert result["base"] != result["corrupted"]
    guillotine = generate(GenSpec(GenKind.GUILLOTINE_PARTITION, seed=2, pieces=3))
    assert len(guillotine["parts"].rects) == 3
    assert guillotine["whole"].base.intervals == ((Fraction(0), Fraction(1)),)


def test_single_point_corruption_moves_its_only_value():
    corrupted = gen_corrupted(0, counting_space(1), ExtReal(1))
    assert corrupted.measure.values[1] in (ExtReal(0), ExtReal(2))
