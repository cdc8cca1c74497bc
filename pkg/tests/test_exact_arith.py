from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import ParseError
from src.exact_arith import (
    INF,
    ONE,
    ZERO,
    ExtReal,
    Ordering,
    add,
    cmp,
    div,
    format_ext,
    mul,
    parse_ext,
    parse_rational,
    sub,
    total,
)

finite_values = st.fractions(min_value=0, max_value=1000, max_denominator=60).map(ExtReal)
values = st.one_of(st.just(INF), finite_values)


def test_zero_times_infinity_is_zero():
    assert mul(ZERO, INF) == ZERO
    assert mul(INF, ZERO) == ZERO
    assert mul(ExtReal(1, 2), INF).is_infinite


def test_infinity_absorbs_addition():
    assert add(INF, ONE).is_infinite
    assert total([ONE, ExtReal(1, 2), ExtReal(1, 3)]) == ExtReal(11, 6)


def test_comparison_by_cross_multiplication():
    assert cmp(ExtReal(1, 3), ExtReal(1, 2)) is Ordering.LT
    assert cmp(ExtReal(2, 4), ExtReal(1, 2)) is Ordering.EQ
    assert cmp(INF, INF) is Ordering.EQ
    assert cmp(INF, ExtReal(10 ** 9)) is Ordering.GT


def test_negative_values_are_rejected():
    with pytest.raises(ValueError):
        ExtReal(-1)


def test_sub_and_div_are_finite_only():
    assert sub(ONE, ExtReal(1, 3)) == ExtReal(2, 3)
    assert div(ExtReal(1, 2), ExtReal(3)) == ExtReal(1, 6)
    with pytest.raises(ValueError):
        sub(ExtReal(1, 3), ONE)
    with pytest.raises(ValueError):
        sub(INF, ONE)
    with pytest.raises(ValueError):
        div(ONE, ZERO)


def test_format_always_carries_a_denominator():
    assert format_ext(ExtReal(1, 2)) == "1/2"
    assert format_ext(ExtReal(3)) == "3/1"
    assert format_ext(INF) == "inf"


@pytest.mark.parametrize("text, expected", [("inf", INF), ("3", ExtReal(3)), ("5/6", ExtReal(5, 6)), ("0/1", ZERO)])
def test_parse_accepts_canonical_forms(text, expected):
    assert parse_ext(text) == expected


@pytest.mark.parametrize(
    "text",
    ["2/4", "1/0", "-1", "0/5", "1.5", "", "infinity", True, "03/4", "3/04", "007", "00", "\u0663/4", "\uff11"],
)
def test_parse_rejects_non_canonical_forms(text):
    with pytest.raises(ParseError):
        parse_ext(text)


def test_parse_rational_is_signed():
    assert parse_rational("-1/2") == Fraction(-1, 2)
    assert parse_rational(3) == Fraction(3)
    with pytest.raises(ParseError):
        parse_rational("-0")
    with pytest.raises(ParseError):
        parse_rational("inf")


@given(values, values)
def test_addition_commutes(a, b):
    assert a + b == b + a


@given(values, values, values)
def test_addition_associates(a, b, c):
    assert (a + b) + c == a + (b + c)


@given(values, values)
def test_multiplication_commutes(a, b):
    assert mul(a, b) == mul(b, a)


@given(values, values, values)
def test_multiplication_associates(a, b, c):
    assert mul(mul(a, b), c) == mul(a, mul(b, c))


@given(values, values, values)
def test_multiplication_distributes_over_addition(a, b, c):
    assert mul(a, b + c) == mul(a, b) + mul(a, c)


@pytest.mark.parametrize("a, b, c", list(permutations([ZERO, INF, ExtReal(1, 2)])))
def test_zero_infinity_and_a_finite_value(a, b, c):
    assert mul(mul(a, b), c) == mul(a, mul(b, c)) == ZERO
    assert mul(a, b + c) == mul(a, b) + mul(a, c)


@given(values, values, values)
def test_order_is_compatible_with_addition(a, b, c):
    if a <= b:
        assert a + c <= b + c


@given(values)
def test_formatted_values_parse_back(a):
    assert parse_ext(format_ext(a)) == a
