from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from orkit import exact as ex

small = st.integers(-4, 4)


def int_matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_to_fraction_inputs():
    assert ex.to_fraction("-3/4") == Fraction(-3, 4)
    assert ex.to_fraction("0.225") == Fraction(9, 40)
    assert ex.to_fraction(2) == 2
    assert ex.to_fraction(0.5) == Fraction(1, 2)


def test_rref_known():
    R, piv = ex.rref(ex.qmat([[2, 4, 1], [1, 2, 1]]))
    assert piv == [0, 2]
    assert R.tolist() == [[1, 2, 0], [0, 0, 1]]


def test_inverse_and_singular():
    M = ex.qmat([[2, 1], [1, 1]])
    assert ex.inverse(M).tolist() == [[1, -1], [-1, 2]]
    with pytest.raises(np.linalg.LinAlgError):
        ex.inverse(ex.qmat([[1, 2], [2, 4]]))


def test_pinv_invertible_and_full_row_rank():
    M = ex.qmat([[2, 1], [1, 1]])
    assert np.array_equal(ex.pinv(M), ex.inverse(M))
    H = ex.qmat([[1, 0, 1], [0, 1, 1]])
    expected = H.T @ ex.inverse(H @ H.T)
    assert np.array_equal(ex.pinv(H), expected)


def test_solve_left_and_right():
    W = ex.qmat([[1, 0, 1], [0, 1, 1]])
    M = ex.qmat([[2, 3, 5]])
    X = ex.solve_left(W, M)
    assert np.array_equal(X @ W, M)
    assert ex.solve_left(W, ex.qmat([[1, 0, 0]])) is None
    A = ex.qmat([[1, 1], [0, 1]])
    b = ex.qmat([[3], [1]])
    x = ex.solve_right(A, b)
    assert np.array_equal(A @ x, b)


@given(int_matrices())
def test_rank_matches_sympy(rows):
    assert ex.rank(ex.qmat(rows)) == oracles.rank(rows)


@given(int_matrices())
def test_nullspace_is_complement(rows):
    M = ex.qmat(rows)
    N = ex.nullspace(M)
    n = M.shape[1]
    assert N.shape == (n, n - ex.rank(M))
    if N.size:
        assert ex.is_zero(M @ N)
        assert ex.rank(N) == N.shape[1]


@given(int_matrices())
def test_row_basis_same_space(rows):
    M = ex.qmat(rows)
    B = ex.row_basis(M)
    assert B.shape[0] == ex.rank(M)
    if B.size:
        assert oracles.same_row_space(B, M)


@given(int_matrices())
def test_pinv_matches_sympy_and_penrose(rows):
    H = ex.qmat(rows)
    P = ex.pinv(H)
    assert np.array_equal(P, oracles.to_np(oracles.pinv(rows)))
    assert np.array_equal(H @ P @ H, H)
    assert np.array_equal(P @ H @ P, P)
    assert np.array_equal((H @ P).T, H @ P)
    assert np.array_equal((P @ H).T, P @ H)


@given(st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_charpoly_matches_sympy(rows):
    assert ex.charpoly(ex.qmat(rows)) == oracles.charpoly_coeffs(rows)
