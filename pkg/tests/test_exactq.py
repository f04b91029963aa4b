from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from etrarm.exactq import (DimensionError, NegativeSqrt, RatMatrix, bareiss, det, det4_leibniz, exact_rank,
                           mat_mul, minors, rank_by_minors, rational_sqrt)

from conftest import rand_matrix, rat_matrices, rationals


def block_diag_i2(block):
    (p, q), (r, s) = block
    return RatMatrix.from_rows([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, p, q], [0, 0, r, s]])


def test_ratmatrix_drops_zeros_and_checks_bounds():
    m = RatMatrix(2, 2, {(0, 0): 0, (1, 1): Fraction(2, 4)})
    assert m.nnz() == 1
    assert m[1, 1] == Fraction(1, 2)
    with pytest.raises(DimensionError):
        RatMatrix(2, 2, {(2, 0): 1})
    with pytest.raises(TypeError):
        RatMatrix(1, 1, {(0, 0): 0.5})


def test_det4_identity():
    assert det4_leibniz(RatMatrix.identity(4)) == 1


def test_det4_gadget_block_singular():
    assert det4_leibniz(block_diag_i2([[1, 2], [3, 6]])) == 0


def test_det4_gadget_block_unit():
    # cofactor expansion by hand: det = 1*1*(1*7 - 2*3) = 1
    assert det4_leibniz(block_diag_i2([[1, 2], [3, 7]])) == 1


def test_det4_rejects_other_shapes():
    with pytest.raises(DimensionError):
        det4_leibniz(RatMatrix.identity(3))


def test_rank_of_zero_matrices():
    for shape in [(1, 1), (3, 5), (7, 2)]:
        assert exact_rank(RatMatrix(*shape)) == 0


def test_rank_of_outer_product():
    u = RatMatrix.from_rows([[1], [Fraction(-2, 3)], [5]])
    v = RatMatrix.from_rows([[2, 0, Fraction(1, 7), -1]])
    assert exact_rank(mat_mul(u, v)) == 1


def test_rank_of_7x3_times_3x9(rng):
    while True:
        u = RatMatrix.from_rows([[rng.randint(-5, 5) for _ in range(3)] for _ in range(7)])
        v = RatMatrix.from_rows([[rng.randint(-5, 5) for _ in range(9)] for _ in range(3)])
        if rank_by_minors(u) == 3 and rank_by_minors(v) == 3:
            break
    x = mat_mul(u, v)
    # oracle: every 4x4 minor vanishes and some 3x3 minor does not
    assert all(val == 0 for _, _, val in minors(x, 4))
    assert any(val != 0 for _, _, val in minors(x, 3))
    assert exact_rank(x) == 3


def test_mat_mul_identity_and_shape_errors(rng):
    b = rand_matrix(rng, 3, 5)
    assert mat_mul(RatMatrix.identity(3), b) == b
    with pytest.raises(DimensionError):
        mat_mul(b, b)


def test_mat_mul_identity_gauge_rows(rng):
    u = rand_matrix(rng, 6, 3).with_entries({(i, j): int(i == j) for i in range(3) for j in range(3)})
    v = rand_matrix(rng, 3, 5)
    x = mat_mul(u, v)
    for i in range(3):
        assert [x[i, j] for j in range(5)] == [v[i, j] for j in range(5)]


def test_mat_mul_gadget_outer_product():
    a, b = Fraction(2, 3), Fraction(-5)
    x = mat_mul(RatMatrix.from_rows([[1], [b]]), RatMatrix.from_rows([[1, a]]))
    assert x == RatMatrix.from_rows([[1, a], [b, a * b]])


@pytest.mark.parametrize("x, root", [(Fraction(9, 4), Fraction(3, 2)), (0, 0), (1, 1), (Fraction(1, 49), Fraction(1, 7))])
def test_rational_sqrt_perfect_squares(x, root):
    assert rational_sqrt(x) == root


@pytest.mark.parametrize("x", [2, Fraction(1, 2), Fraction(8, 9), 10**20 + 1])
def test_rational_sqrt_irrational(x):
    assert rational_sqrt(x) is None


def test_rational_sqrt_negative():
    with pytest.raises(NegativeSqrt):
        rational_sqrt(Fraction(-1, 4))


def test_det_leibniz_agrees_with_bareiss_pivot(rng):
    for _ in range(200):
        m = rand_matrix(rng, 4, 4)
        assert det4_leibniz(m) == bareiss(m)[1]


def test_det_of_singular_and_empty():
    assert det(RatMatrix.from_rows([[1, 2], [2, 4]])) == 0
    assert det(RatMatrix(0, 0)) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_rank_matches_minor_characterization(rows, cols, data):
    m = data.draw(rat_matrices(rows, cols))
    assert exact_rank(m) == rank_by_minors(m)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_rank_invariant_under_permutation_and_scaling(rows, cols, data):
    m = data.draw(rat_matrices(rows, cols))
    rperm = data.draw(st.permutations(range(rows)))
    cperm = data.draw(st.permutations(range(cols)))
    row = data.draw(st.integers(0, rows - 1))
    scale = data.draw(rationals.filter(bool))
    r = exact_rank(m)
    assert exact_rank(m.submatrix(rperm, cperm)) == r
    scaled = m.with_entries({(row, j): m[row, j] * scale for j in range(cols)})
    assert exact_rank(scaled) == r


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7), st.data())
def test_rank_of_product_through_three_is_at_most_three(rows, cols, data):
    u = data.draw(rat_matrices(rows, 3))
    v = data.draw(rat_matrices(3, cols))
    assert exact_rank(mat_mul(u, v)) <= 3


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 5), st.integers(3, 5), st.data())
def test_rank_two_matrices_have_vanishing_3x3_minors(rows, cols, data):
    m = mat_mul(data.draw(rat_matrices(rows, 2)), data.draw(rat_matrices(2, cols)))
    assert exact_rank(m) <= 2
    assert all(v == 0 for _, _, v in minors(m, 3))


def test_bareiss_rank_on_rectangular_with_zero_columns():
    m = RatMatrix.from_rows([[0, 1, 2], [0, 2, 4], [0, 0, 1]])
    assert bareiss(m) == (2, Fraction(0))
    assert exact_rank(m.transpose()) == 2
