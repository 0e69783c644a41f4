from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import projection_lstsq, v_inner, v_norm, v_sub
from orkit.errors import DimensionOverflowError, ShapeError
from orkit.xspace import (DimVector, ProjectionMatrix, distance, equivalent, inner, lcm, norm,
                          project, projection_matrix, stp_add)

floats = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vectors = st.lists(floats, min_size=1, max_size=8)


def test_stp_add_mixed_dimensions():
    assert np.array_equal(stp_add([1, 2], [1, 1, 1]).entries, [2, 2, 2, 3, 3, 3])


def test_stp_add_equal_dimensions():
    assert np.array_equal(stp_add([1, 2], [3, 4]).entries, [4, 6])


def test_zero_is_neutral_up_to_equivalence():
    x = DimVector([1.5, -2.0])
    assert distance(x + np.zeros(3), x) == 0


def test_inner_examples():
    assert inner([1, 1], [1, 1]) == 1
    assert inner([3], [3]) == 9
    assert inner([1, 0], [1, 1, 1]) == pytest.approx(0.5)


def test_distance_examples():
    assert distance([1, 2], [1, 1, 2, 2]) == 0
    assert equivalent([1, 2], [1, 1, 2, 2])
    assert norm(np.zeros(4)) == 0
    assert distance([1, 0], [0, 1]) == pytest.approx(1.0)
    assert not equivalent([1, 0], [0, 1])


def test_projection_matrix_two_to_five():
    expected = [[1, 0], [1, 0], [0.5, 0.5], [0, 1], [0, 1]]
    assert np.allclose(projection_matrix(2, 5), expected, atol=1e-15)
    assert np.allclose(projection_matrix(2, 5), projection_lstsq(2, 5), atol=1e-12)


def test_projection_matrix_six_to_two():
    expected = np.array([[1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1]]) / 3
    assert np.allclose(projection_matrix(6, 2), expected, atol=1e-15)


def test_projection_matrix_exact_is_rational():
    P = projection_matrix(6, 4, exact=True)
    assert all(isinstance(v, Fraction) for v in P.flat)
    assert np.allclose(P.astype(float), projection_matrix(6, 4))


@pytest.mark.parametrize("m,n", [(m, n) for m in range(1, 9) for n in range(1, 9)])
def test_projection_matrix_matches_least_squares(m, n):
    assert np.allclose(projection_matrix(m, n), projection_lstsq(m, n), atol=1e-12)


@pytest.mark.parametrize("n", range(1, 7))
def test_projection_matrix_identity(n):
    assert np.array_equal(projection_matrix(n, n), np.eye(n))


def test_project_examples():
    assert np.allclose(project([1, 2, 0, -2, -1, -1], 2).entries, [1, -4 / 3])
    x = DimVector([0.3, -1.0, 2.0])
    assert np.array_equal(project(x, 3).entries, x.entries)
    assert np.allclose(project([1, 1, 1, 1], 2).entries, [1, 1])


def test_projection_matrix_object():
    P = ProjectionMatrix.build(6, 2)
    assert np.allclose(P([1, 2, 0, -2, -1, -1]).entries, [1, -4 / 3])
    with pytest.raises(ShapeError):
        P([1, 2])


def test_errors():
    with pytest.raises(ShapeError):
        DimVector([])
    with pytest.raises(ShapeError):
        projection_matrix(0, 3)
    with pytest.raises(DimensionOverflowError):
        lcm(2**62 - 1, 2**61 - 1)


# properties


@given(vectors, st.integers(1, 8))
def test_projection_orthogonality(xi, n):
    p = project(xi, n)
    assert abs(inner(p, stp_add(xi, -p))) <= 1e-9 * max(1.0, norm(xi) ** 2)


@given(vectors, st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_projection_optimality(xi, n, seed):
    p = project(xi, n).entries
    best = v_norm(v_sub(xi, p))
    rng = np.random.default_rng(seed)
    for _ in range(200):
        q = p + rng.normal(scale=0.1, size=n)
        assert v_norm(v_sub(xi, q)) >= best - 1e-12


@given(vectors, vectors, vectors)
def test_stp_add_commutative_associative(x, y, z):
    assert distance(stp_add(x, y), stp_add(y, x)) <= 1e-9
    assert distance(stp_add(stp_add(x, y), z), stp_add(x, stp_add(y, z))) <= 1e-9


@given(vectors, vectors, st.integers(1, 5))
def test_inner_symmetry_and_blow_up(x, y, k):
    assert inner(x, y) == pytest.approx(inner(y, x), abs=1e-12)
    assert inner(x, y) == pytest.approx(v_inner(x, y), abs=1e-9)
    xv = DimVector(x)
    assert norm(xv.blow_up(k)) == pytest.approx(norm(xv), abs=1e-12)
