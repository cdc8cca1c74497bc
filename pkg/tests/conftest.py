import json
from fractions import Fraction

import pytest

from src.exact_arith import ExtReal
from src.product import Rect
from src.spaces import FiniteSet, IntervalUnion, counting_space, length_space, tabulated_space


def interval(a, b) -> IntervalUnion:
    return IntervalUnion.interval(Fraction(a), Fraction(b))


@pytest.fixture
def counting3():
    return counting_space(3)


@pytest.fixture
def line():
    return length_space()


@pytest.fixture
def unit_square():
    return Rect(interval(0, 1), interval(0, 1))


@pytest.fixture
def block_space():
    """Blocks {0,1} and {2,3} weighing 1 and 2, tabulated on their runs."""
    return tabulated_space(4, {
        FiniteSet.of(0, 1): ExtReal(1),
        FiniteSet.of(2, 3): ExtReal(2),
        FiniteSet.of(0, 1, 2, 3): ExtReal(3),
    })


@pytest.fixture
def write_json(tmp_path):
    def write(name: str, payload) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return write
