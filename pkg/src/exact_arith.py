from __future__ import annotations

import re
from enum import IntEnum
from fractions import Fraction
from typing import Iterable

from src.errors import ParseError

# --- CONFIGURATION ---
# Accepted textual forms: "inf", "k" (integer shorthand for k/1) and "num/den".
_VALUE_PATTERN = re.compile(r"^(?P<num>0|[1-9][0-9]*)(?:/(?P<den>[1-9][0-9]*))?$")


class Ordering(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


class ExtReal:
    """
    An exact value in [0, inf]: a nonnegative rational or +infinity.

    Finite values wrap a Fraction, which keeps them in lowest terms with a
    positive denominator. Instances are immutable and hashable.
    """

    __slots__ = ("_q",)

    def __init__(self, num: int | Fraction = 0, den: int = 1) -> None:
        q = num if isinstance(num, Fraction) else Fraction(num, den)
        if q < 0:
            raise ValueError(f"❌ Negative values are not measure values: {q}")
        self._q = q

    @classmethod
    def infinity(cls) -> ExtReal:
        value = cls.__new__(cls)
        value._q = None
        return value

    @property
    def is_finite(self) -> bool:
        return self._q is not None

    @property
    def is_infinite(self) -> bool:
        return self._q is None

    @property
    def is_zero(self) -> bool:
        return self._q == 0

    @property
    def fraction(self) -> Fraction:
        """The underlying Fraction; only defined for finite values."""
        if self._q is None:
            raise ValueError("❌ Infinity has no rational value.")
        return self._q

    @property
    def numerator(self) -> int:
        return self.fraction.numerator

    @property
    def denominator(self) -> int:
        return self.fraction.denominator

    def __add__(self, other: ExtReal) -> ExtReal:
        return add(self, _coerce(other))

    __radd__ = __add__

    def __mul__(self, other: ExtReal) -> ExtReal:
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int | Fraction):
            return self._q is not None and self._q == other
        if not isinstance(other, ExtReal):
            return NotImplemented
        return self._q == other._q

    def __hash__(self) -> int:
        return hash(("inf",)) if self._q is None else hash(self._q)

    def __lt__(self, other: ExtReal) -> bool:
        return cmp(self, _coerce(other)) is Ordering.LT

    def __le__(self, other: ExtReal) -> bool:
        return cmp(self, _coerce(other)) is not Ordering.GT

    def __gt__(self, other: ExtReal) -> bool:
        return cmp(self, _coerce(other)) is Ordering.GT

    def __ge__(self, other: ExtReal) -> bool:
        return cmp(self, _coerce(other)) is not Ordering.LT

    def __repr__(self) -> str:
        return f"ExtReal({format_ext(self)})"

    def __str__(self) -> str:
        return format_ext(self)


INF = ExtReal.infinity()
ZERO = ExtReal(0)
ONE = ExtReal(1)


def _coerce(value) -> ExtReal:
    if isinstance(value, ExtReal):
        return value
    if isinstance(value, int | Fraction):
        return ExtReal(value)
    raise TypeError(f"Cannot combine ExtReal with {type(value).__name__}")


def add(a: ExtReal, b: ExtReal) -> ExtReal:
    """Exact sum; infinity absorbs."""
    if a.is_infinite or b.is_infinite:
        return INF
    return ExtReal(a.fraction + b.fraction)


def mul(a: ExtReal, b: ExtReal) -> ExtReal:
    """Exact product with the measure-theoretic convention 0 * inf = 0."""
    if a.is_zero or b.is_zero:
        return ZERO
    if a.is_infinite or b.is_infinite:
        return INF
    return ExtReal(a.fraction * b.fraction)


def cmp(a: ExtReal, b: ExtReal) -> Ordering:
    """Total order by cross multiplication; infinity is the greatest element."""
    if a.is_infinite or b.is_infinite:
        if a.is_infinite and b.is_infinite:
            return Ordering.EQ
        return Ordering.GT if a.is_infinite else Ordering.LT
    left = a.numerator * b.denominator
    right = b.numerator * a.denominator
    if left == right:
        return Ordering.EQ
    return Ordering.LT if left < right else Ordering.GT


def sub(a: ExtReal, b: ExtReal) -> ExtReal:
    """Difference a - b of finite values with a >= b."""
    if a.is_infinite or b.is_infinite:
        raise ValueError("❌ Subtraction is only defined between finite values.")
    if a < b:
        raise ValueError(f"❌ {a} - {b} would be negative.")
    return ExtReal(a.fraction - b.fraction)


def div(a: ExtReal, b: ExtReal) -> ExtReal:
    """Quotient a / b of a finite value by a finite positive value."""
    if a.is_infinite or b.is_infinite or b.is_zero:
        raise ValueError(f"❌ {a} / {b} is not a finite quotient.")
    return ExtReal(a.fraction / b.fraction)


def total(values: Iterable[ExtReal]) -> ExtReal:
    result = ZERO
    for value in values:
        result = add(result, value)
    return result


def format_ext(value: ExtReal) -> str:
    """Formats as "num/den" (always with a denominator) or "inf"."""
    if value.is_infinite:
        return "inf"
    return f"{value.numerator}/{value.denominator}"


def parse_ext(text: str | int) -> ExtReal:
    """
    Parses "inf", "k" or "num/den".

    "num/den" must already be in lowest terms with den >= 1, so "2/4" and
    "0/5" are rejected rather than silently normalized. Digits are ASCII only
    and carry no leading zeros ("03/4" is rejected).
    """
    if isinstance(text, bool):
        raise ParseError(f"❌ Not a measure value: {text!r}")
    if isinstance(text, int):
        if text < 0:
            raise ParseError(f"❌ Negative value {text} is not allowed.")
        return ExtReal(text)
    if not isinstance(text, str):
        raise ParseError(f"❌ Expected a value string, got {type(text).__name__}.")
    raw = text.strip()
    if raw == "inf":
        return INF
    match = _VALUE_PATTERN.match(raw)
    if match is None:
        raise ParseError(f"❌ Cannot read {text!r}: expected 'inf', 'k' or 'num/den'.")
    num = int(match.group("num"))
    if match.group("den") is None:
        return ExtReal(num)
    # The pattern already excludes a zero denominator.
    den = int(match.group("den"))
    q = Fraction(num, den)
    if (q.numerator, q.denominator) != (num, den):
        raise ParseError(
            f"❌ {text!r} is not canonical; write it as '{q.numerator}/{q.denominator}'."
        )
    return ExtReal(q)


def parse_rational(text: str | int) -> Fraction:
    """Parses a signed canonical rational ("-1/2", "3", "0") for interval endpoints."""
    if isinstance(text, bool):
        raise ParseError(f"❌ Not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"❌ Expected a rational string, got {type(text).__name__}.")
    raw = text.strip()
    negative = raw.startswith("-")
    magnitude = parse_ext(raw[1:] if negative else raw)
    if magnitude.is_infinite:
        raise ParseError(f"❌ Interval endpoints must be finite: {text!r}")
    if negative and magnitude.is_zero:
        raise ParseError(f"❌ '-0' is not canonical in {text!r}.")
    return -magnitude.fraction if negative else magnitude.fraction


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"
