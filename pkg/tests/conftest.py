import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from etrarm.exactq import RatMatrix

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def rat_matrices(rows, cols):
    return st.lists(st.lists(rationals, min_size=cols, max_size=cols), min_size=rows, max_size=rows).map(
        RatMatrix.from_rows)


@pytest.fixture
def rng():
    return random.Random(20261016)


def rand_rat(rng, span=9, den=6):
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def rand_matrix(rng, rows, cols, **kw):
    return RatMatrix.from_rows([[rand_rat(rng, **kw) for _ in range(cols)] for _ in range(rows)])
