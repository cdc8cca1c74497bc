from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import CertificationFailed, PreconditionFailed
from src.exact_arith import INF, ExtReal
from src.generators import gen_random_rect_family
from src.product import DyadicTail, ProductSet, Rect, RectFamily, _covers, _overlapping_pairs, rect_disjointify
from src.spaces import FiniteSet, FiniteUniverse, IntervalUnion, counting_space, point_mass_space, tabulated_space
from src.theorem import (
    Direction,
    NullSectionVerdict,
    certify_sigma_additivity,
    check_null_section_equivalence,
    choose_levels,
    extract_witness,
    null_section_converse,
    null_section_forward,
    recheck_witness,
    stabilization_depth,
)


def I(a, b) -> IntervalUnion:
    return IntervalUnion.interval(Fraction(a), Fraction(b))


@pytest.mark.parametrize(
    "t, mu_b, mu_c, expected",
    [
        (ExtReal(1, 2), ExtReal(1), ExtReal(1), (ExtReal(3, 4), ExtReal(5, 6))),
        (ExtReal(2), INF, INF, (ExtReal(3), ExtReal(3))),
        (ExtReal(1), INF, ExtReal(2), (ExtReal(2), ExtReal(1))),
        (ExtReal(1), ExtReal(2), INF, (ExtReal(1), ExtReal(2))),
    ],
)
def test_levels_sit_between_t_and_the_product(t, mu_b, mu_c, expected):
    r, s = choose_levels(t, mu_b, mu_c)
    assert (r, s) == expected
    assert r * s > t


# ==========================================
# WITNESS EXTRACTION
# ==========================================

@pytest.fixture
def full_square():
    """All four cells of counting(2) × counting(2), covered row by row."""
    x, y = counting_space(2), counting_space(2)
    d = ProductSet.from_points([(0, 0), (0, 1), (1, 0), (1, 1)], x.universe, y.universe)
    return x, y, d


def test_rows_witness(full_square):
    x, y, d = full_square
    witness = extract_witness(x, y, d, d.family, ExtReal(1), ExtReal(1))
    assert witness.indices == (0, 1)
    assert witness.points == (0, 1)
    assert (witness.lhs, witness.rhs) == (ExtReal(1), ExtReal(4))
    assert witness.union_outer == ExtReal(2)


def test_serialized_witness_rechecks(full_square):
    x, y, d = full_square
    payload = extract_witness(x, y, d, d.family, ExtReal(1), ExtReal(1)).to_json()
    assert recheck_witness(payload).passed

    payload["indices"] = [0]
    assert not recheck_witness(payload).passed


def test_level_set_must_exceed_s(full_square):
    x, y, d = full_square
    with pytest.raises(PreconditionFailed):
        extract_witness(x, y, d, d.family, ExtReal(1), ExtReal(2))


def test_overlapping_cover_is_refused(full_square):
    x, y, d = full_square
    cover = RectFamily((Rect(FiniteSet.of(0, 1), FiniteSet.of(0, 1)), Rect(FiniteSet.of(0), FiniteSet.of(0))))
    with pytest.raises(PreconditionFailed) as info:
        extract_witness(x, y, d, cover, ExtReal(1), ExtReal(1))
    assert info.value.evidence["overlaps"] == [(0, 1)]


def test_cover_must_contain_the_set(full_square):
    x, y, d = full_square
    cover = RectFamily((Rect(FiniteSet.of(0), FiniteSet.of(0, 1)),))
    with pytest.raises(PreconditionFailed):
        extract_witness(x, y, d, cover, ExtReal(1, 2), ExtReal(1, 2))


unit_points = st.fractions(0, 1, max_denominator=8)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), data=st.data())
def test_refined_cover_still_yields_a_witness(seed, data):
    instance = gen_random_rect_family(seed)
    x, y = instance.space_x, instance.space_y
    if isinstance(x.universe, FiniteUniverse):
        base = FiniteSet(tuple(data.draw(st.sets(st.sampled_from(list(x.universe.points())), min_size=1))))
        side = FiniteSet(tuple(data.draw(st.sets(st.sampled_from(list(y.universe.points())), min_size=1))))
    else:
        base = IntervalUnion.interval(*sorted((data.draw(unit_points), data.draw(unit_points))))
        side = IntervalUnion.interval(*sorted((data.draw(unit_points), data.draw(unit_points))))
    refined = rect_disjointify((Rect(base, side),) + instance.cover.rects)
    assert refined.overlapping_pairs() == []
    witness = extract_witness(x, y, instance.d, refined, instance.r, instance.s)
    assert recheck_witness(witness.to_json()).passed


# ==========================================
# CERTIFICATION
# ==========================================

@pytest.fixture
def three_pieces():
    return RectFamily((
        Rect(I(0, Fraction(1, 2)), I(0, 1)),
        Rect(I(Fraction(1, 2), 1), I(0, Fraction(1, 3))),
        Rect(I(Fraction(1, 2), 1), I(Fraction(1, 3), 1)),
    ))


def test_finite_partition_is_exact(line, unit_square, three_pieces):
    report = certify_sigma_additivity(line, line, unit_square, three_pieces, ExtReal(1, 2))
    assert report.exact is True
    assert report.partial_sums[-1] == (3, ExtReal(1))
    assert report.witness.indices == (0, 1, 2)
    assert report.witness.rhs == ExtReal(1)


def test_staircase_depth_matches_the_closed_form(line, unit_square):
    parts = RectFamily((), DyadicTail("base", I(0, 1)))
    report = certify_sigma_additivity(line, line, unit_square, parts, ExtReal(7, 8))
    assert report.exact is None
    assert report.required_depth == 3
    assert report.depth_used == 4
    assert report.witness.rhs == ExtReal(31, 32)
    assert report.partial_sums[-1] == (5, ExtReal(31, 32))


def _pair_space(single: int, whole: int):
    return tabulated_space(2, {
        FiniteSet.of(0): ExtReal(single),
        FiniteSet.of(1): ExtReal(1),
        FiniteSet.of(0, 1): ExtReal(whole),
    })


@pytest.fixture
def pair_rectangle():
    whole = Rect(FiniteSet.of(0, 1), FiniteSet.of(0))
    parts = RectFamily((Rect(FiniteSet.of(0), FiniteSet.of(0)), Rect(FiniteSet.of(1), FiniteSet.of(0))))
    return whole, parts


def test_additive_table_is_certified(pair_rectangle):
    whole, parts = pair_rectangle
    report = certify_sigma_additivity(_pair_space(1, 2), counting_space(1), whole, parts, ExtReal(1))
    assert report.certified
    assert report.witness.indices == (0, 1)


def test_inflated_part_fails_the_upper_half(pair_rectangle):
    whole, parts = pair_rectangle
    with pytest.raises(CertificationFailed) as info:
        certify_sigma_additivity(_pair_space(3, 2), counting_space(1), whole, parts, ExtReal(1))
    assert (info.value.half, info.value.truncation) == ("upper", 1)


def test_inflated_whole_fails_exactness(pair_rectangle):
    whole, parts = pair_rectangle
    with pytest.raises(CertificationFailed) as info:
        certify_sigma_additivity(_pair_space(1, 3), counting_space(1), whole, parts, ExtReal(1))
    assert info.value.half == "exact"


def test_t_must_be_below_the_product(line, unit_square, three_pieces):
    with pytest.raises(PreconditionFailed):
        certify_sigma_additivity(line, line, unit_square, three_pieces, ExtReal(1))


def test_overlapping_parts_are_refused(line, unit_square):
    parts = RectFamily((Rect(I(0, 1), I(0, 1)), Rect(I(0, Fraction(1, 2)), I(0, 1))))
    with pytest.raises(PreconditionFailed):
        certify_sigma_additivity(line, line, unit_square, parts, ExtReal(1, 2))


def test_parts_must_fill_the_rectangle(line, unit_square):
    parts = RectFamily((Rect(I(0, Fraction(1, 2)), I(0, 1)),))
    with pytest.raises(PreconditionFailed):
        certify_sigma_additivity(line, line, unit_square, parts, ExtReal(1, 4))


def test_later_levels_reuse_the_structural_checks(line, unit_square, three_pieces):
    certify_sigma_additivity(line, line, unit_square, three_pieces, ExtReal(1, 2))
    misses = (_covers.cache_info().misses, _overlapping_pairs.cache_info().misses)
    certify_sigma_additivity(line, line, unit_square, three_pieces, ExtReal(3, 4))
    assert (_covers.cache_info().misses, _overlapping_pairs.cache_info().misses) == misses


# ==========================================
# NULL SECTIONS
# ==========================================

@pytest.fixture
def weightless_row():
    """Row x = 0 has weight 0, so D = {0} × Y is null in the product."""
    x, y = point_mass_space([0, 1]), counting_space(2)
    d = ProductSet.from_points([(0, 0), (0, 1)], x.universe, y.universe)
    return x, y, d


def test_stabilization_depth_from_the_smallest_value(weightless_row):
    _, y, d = weightless_row
    assert stabilization_depth(y, d) == 2


def test_forward_direction(weightless_row):
    x, y, d = weightless_row
    verdict = null_section_forward(x, y, d)
    assert verdict.direction is Direction.FORWARD
    assert verdict.holds
    assert verdict.exceptional_set == FiniteSet.of(0)
    assert verdict.exceptional_outer == ExtReal(0)
    assert verdict.steps["matches_direct"]


def test_forward_needs_a_null_set(weightless_row):
    x, y, _ = weightless_row
    d = ProductSet.from_points([(1, 0)], x.universe, y.universe)
    with pytest.raises(PreconditionFailed) as info:
        null_section_forward(x, y, d)
    assert info.value.evidence["product_outer"] == ExtReal(1)


def test_converse_direction(weightless_row):
    x, y, d = weightless_row
    verdict = null_section_converse(x, y, d)
    assert verdict.holds
    assert verdict.steps["full_rows"] == FiniteSet.of(1)
    assert verdict.steps["complement_outer"] == ExtReal(2)
    assert verdict.steps["derived_outer"] == ExtReal(0)
    assert verdict.steps["complement_witness"].rhs == ExtReal(2)
    assert verdict.steps["complement_witness_error"] is None
    assert verdict.to_json()["direction"] == "converse"


def test_converse_refuses_a_non_measurable_set():
    x = tabulated_space(2, {FiniteSet.of(0, 1): ExtReal(1)})
    y = counting_space(1)
    d = ProductSet.from_points([(0, 0)], x.universe, y.universe)
    with pytest.raises(PreconditionFailed) as info:
        null_section_converse(x, y, d)
    assert info.value.evidence["test_set"].points() == [(0, 0), (1, 0)]


def test_converse_refuses_interval_universes(line, unit_square):
    d = ProductSet(RectFamily((unit_square,)), line.universe, line.universe)
    with pytest.raises(PreconditionFailed):
        null_section_converse(line, line, d)


def test_converse_refuses_positive_sections(weightless_row):
    x, y, _ = weightless_row
    d = ProductSet.from_points([(1, 0), (1, 1)], x.universe, y.universe)
    with pytest.raises(PreconditionFailed) as info:
        null_section_converse(x, y, d)
    assert info.value.evidence["exceptional_outer"] == ExtReal(1)


def test_converse_fails_when_the_complement_witness_errors(weightless_row, monkeypatch):
    def refuse(*args, **kwargs):
        raise CertificationFailed("❌ The selection never passed the thresholds.", half="witness")

    monkeypatch.setattr("src.theorem.extract_witness", refuse)
    verdict = null_section_converse(*weightless_row)
    assert not verdict.holds
    assert verdict.steps["complement_witness"] is None
    assert verdict.steps["complement_witness_error"]["error"] == "CertificationFailed"
    assert verdict.to_json()["steps"]["complement_witness_error"]["message"].startswith("❌")


def test_null_set_pairs_forward_with_the_section_scan(weightless_row):
    report = check_null_section_equivalence(*weightless_row)
    assert report.passed
    assert report.details["product_outer"] == ExtReal(0)
    assert report.details["forward"].holds
    assert report.details["sections_null"]


def test_heavy_set_has_no_forward_verdict(weightless_row):
    x, y, _ = weightless_row
    d = ProductSet.from_points([(1, 0)], x.universe, y.universe)
    report = check_null_section_equivalence(x, y, d)
    assert report.passed
    assert report.details["forward"] is None
    assert report.details["product_outer"] == ExtReal(1)
    assert not report.details["sections_null"]


def test_forward_agrees_with_the_section_scan_on_every_subset(weightless_row):
    x, y, _ = weightless_row
    cells = [(a, b) for a in x.universe.points() for b in y.universe.points()]
    nulls = 0
    for mask in range(1 << len(cells)):
        d = ProductSet.from_points((c for i, c in enumerate(cells) if mask >> i & 1), x.universe, y.universe)
        report = check_null_section_equivalence(x, y, d)
        assert report.passed
        nulls += report.details["forward"] is not None
    # Exactly the subsets of the weightless row are null.
    assert nulls == 4


def test_disagreeing_forward_verdict_is_reported(weightless_row, monkeypatch):
    def wrong_forward(space_x, space_y, d):
        return NullSectionVerdict(Direction.FORWARD, False, FiniteSet.of(0), ExtReal(1))

    monkeypatch.setattr("src.theorem.null_section_forward", wrong_forward)
    report = check_null_section_equivalence(*weightless_row)
    assert not report.passed
    assert report.violations == [{"forward_holds": False, "sections_null": True, "exceptional_outer": ExtReal(0)}]
