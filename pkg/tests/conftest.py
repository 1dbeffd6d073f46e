from fractions import Fraction

import pytest

from dynlab.space import line_space
from dynlab.system import cantor, circle_grid, from_mapping, interval_grid, shift_to_limit


def F(s) -> Fraction:
    return Fraction(s)


def labels(f, indices):
    return {f.space.labels[i] for i in indices}


def seq(f, *labs):
    return tuple(f.space.index(l) for l in labs)


@pytest.fixture
def E1():
    return cantor(1)


@pytest.fixture
def E2():
    return cantor(2)


@pytest.fixture
def I4():
    return interval_grid(4)


@pytest.fixture
def rot():
    """Quarter rotation of the 4-point circle grid."""
    return circle_grid(4, Fraction(1, 4))


@pytest.fixture
def five_cycle():
    space = line_space([Fraction(i, 5) for i in range(5)])
    return from_mapping(space, {"0": "2/5", "2/5": "4/5", "4/5": "1/5", "1/5": "3/5", "3/5": "0"})


@pytest.fixture
def shift2():
    return shift_to_limit(2)
