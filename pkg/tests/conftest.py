import random

import pytest

from hochlab.exactalg import MultiPoly, parse_poly


@pytest.fixture
def rng():
    return random.Random(12345)


def P2(text: str) -> MultiPoly:
    """Parse a polynomial in x, y (two variables)."""
    return parse_poly(text.replace("x", "x1").replace("y", "x2"), 2)


@pytest.fixture
def p2():
    return P2
