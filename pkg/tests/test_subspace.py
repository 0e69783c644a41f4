import warnings

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

import oracles
from orkit import exact as ex
from orkit import subspace as ss

# Six-state system shared by the extended, feedback and controlled-invariant examples.
A6 = ex.qmat([[0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0], [1, 0, -1, 1, -2, 1],
              [0, 0, 0, 0, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 0]])
B6 = ex.qmat([[0], [0], [1], [0], [0], [0]])
C6 = ex.qmat([[1, 0, 0, 0, 1, 0]])
F6 = ex.qmat([[-1, 0, 2, -1, 2, -1]])

A5 = ex.qmat([[0, -2, 1, -6, -9], [-1, -3, 4, -11, -13], [4, 1, -1, 10, 12],
              [2, 1, -2, 7, 7], [-1, 0, 1, -2, 0]])
C5 = ex.qmat([[1, -1, 1, -2, 0], [-1, 0, 0, -1, -2]])

small = st.integers(-2, 2)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


systems = st.integers(2, 5).flatmap(lambda n: st.tuples(
    square(n),
    st.lists(st.lists(small, min_size=1, max_size=1), min_size=n, max_size=n),
    st.lists(st.lists(small, min_size=n, max_size=n), min_size=1, max_size=2)))


def test_perp_of_single_functional():
    X = ss.perp(ss.row_space(C6))
    assert X.dim == 5
    printed = [[-1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0],
               [1, 0, 0, 0, 0], [0, 0, 0, 0, 1]]
    assert X == ss.Subspace.of(printed)
    assert ss.perp(X) == ss.row_space(C6)


def test_row_space_rank_deficient():
    H = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
    S = ss.row_space(H)
    assert S.dim == oracles.rank(H) == 2
    assert oracles.same_row_space(S.basis, H)


def test_zero_and_whole():
    assert ss.perp(ss.Subspace.zero(3)).dim == 3
    assert ss.perp(ss.Subspace.whole(3)).dim == 0
    assert ss.perp(ss.DualSubspace.of(np.zeros((0, 3)), 3)) == ss.Subspace.whole(3)


def test_float_input_is_rationalized():
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        S = ss.row_space(np.array([[0.5, 0.25]]))
    assert S.basis.tolist() == [[1, ex.to_fraction("0.5")]]


def test_is_A_invariant_examples():
    cert = ss.is_A_invariant(C5, A5)
    assert cert is not None and cert.residual == 0
    assert cert.xi.tolist() == [[0, -1], [-1, -1]]
    I = ex.eye(4)
    A = ex.qmat(np.arange(16).reshape(4, 4))
    assert np.array_equal(ss.is_A_invariant(I, A).xi, A)
    assert ss.is_A_invariant(C6, A6) is None


def test_a_invariant_closure_example():
    printed = [[1, 0, 0, 0, 1, 0], [0, 1, 0, 0, 1, 0], [0, 0, 1, 0, 1, 0],
               [1, 0, -1, 1, -1, 1], [-1, 1, 1, -1, 1, -1]]
    trace: list = []
    closure = ss.a_invariant_closure(C6, A6, trace)
    assert closure == ss.row_space(printed)
    assert trace == sorted(trace) and trace[-1] == 5
    assert ss.krylov_rows(C6, A6).tolist() == printed


def test_a_invariant_closure_fixed_points():
    closure = ss.a_invariant_closure(C6, A6)
    assert ss.a_invariant_closure(closure, A6) == closure
    assert ss.a_invariant_closure(C5, A5) == ss.row_space(C5)
    assert ss.a_invariant_closure(ex.eye(6), A6) == ss.row_space(ex.eye(6))


def test_preimage_examples():
    A = ex.qmat([[2, 1], [0, 1]])
    assert ss.preimage(A, ss.Subspace.whole(2)) == ss.Subspace.whole(2)
    Z = ex.zeros(3, 3)
    assert ss.preimage(Z, ss.Subspace.zero(3)) == ss.Subspace.whole(3)
    S0 = ss.perp(ss.row_space(C6))
    printed = [[1, 0, 0, 0, 0], [0, 0, 0, 1, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0],
               [0, 0, 0, -1, 0], [0, 0, 0, 0, 1]]
    assert ss.preimage(A6, S0) == ss.Subspace.of(printed)


def test_largest_ab_invariant_example():
    trace: list = []
    V = ss.largest_ab_invariant_in(A6, B6, ss.perp(ss.row_space(C6)), trace)
    e4, e6 = np.eye(6)[3], np.eye(6)[5]
    expected = np.column_stack([e4, e6, [1, 1, 1, 0, -1, 0]])
    assert V == ss.Subspace.of(expected)
    assert V.contains((A6 + B6 @ F6) @ V.basis)
    dims = [step.V.dim for step in trace]
    assert dims == sorted(dims, reverse=True) and len(trace) <= 7


def test_largest_ab_invariant_trivial_cases():
    X = ss.Subspace.of([[1], [0], [0], [0], [-1], [0]])
    full = ss.largest_ab_invariant_in(A6, ex.eye(6), X)
    assert full == X
    V = ss.largest_ab_invariant_in(A6, B6, ss.perp(ss.row_space(C6)))
    assert ss.largest_ab_invariant_in(A6, B6, V) == V


def test_friend_examples():
    V = ss.largest_ab_invariant_in(A6, B6, ss.perp(ss.row_space(C6)))
    F = ss.friend(A6, B6, V)
    assert V.contains((A6 + B6 @ F) @ V.basis)
    assert F.tolist() == [[-1, 0, 0, -1, 0, -1]]
    inv = ss.perp(ss.row_space(C5))
    assert ex.is_zero(ss.friend(A5, ex.zeros(5, 1), inv))
    assert ss.friend(A6, B6, ss.Subspace.of([[1], [0], [0], [0], [0], [0]])) is not None
    assert ss.friend(A6, B6, ss.Subspace.of([[0], [1], [0], [0], [0], [0]])) is None


def test_is_ab_invariant_examples():
    assert ss.is_ab_invariant(C6, A6, B6) is None
    closure, F = ss.ab_invariant_closure(C6, A6, B6)
    cert = ss.is_ab_invariant(closure, A6, B6)
    assert cert is not None and cert.residual == 0
    cert = ss.is_ab_invariant(C5, A5, ex.zeros(5, 1))
    assert cert is not None and ex.is_zero(cert.F)
    full = ss.is_ab_invariant(ex.eye(6), A6, B6)
    assert full is not None and full.residual == 0


def test_ab_invariant_closure_example():
    closure, F = ss.ab_invariant_closure(C6, A6, B6)
    printed = [[1, 0, 0, 0, 1, 0], [1, -1, 0, 0, 0, 0], [1, 0, -1, 0, 0, 0]]
    assert closure == ss.row_space(printed)
    again, _ = ss.ab_invariant_closure(closure, A6, B6)
    assert again == closure
    whole, _ = ss.ab_invariant_closure(ex.eye(6), A6, B6)
    assert whole.dim == 6


def test_extend_rows_keeps_leading_rows():
    closure = ss.a_invariant_closure(C6, A6)
    W = ss.extend_rows(C6, closure)
    assert np.array_equal(W[:1], C6)
    assert ss.row_space(W) == closure


# properties


@given(systems)
def test_largest_ab_invariant_matches_oracle(sysdata):
    A, B, H = (ex.qmat(x) for x in sysdata)
    X = ss.perp(ss.row_space(H))
    V = ss.largest_ab_invariant_in(A, B, X)
    ref = oracles.largest_controlled_invariant(A, B, X.basis)
    assert V.dim == ref.rank()
    if V.dim:
        assert oracles.same_col_space(V.basis, oracles.to_np(ref))
    F = ss.friend(A, B, V)
    assert F is not None and V.contains((A + B @ F) @ V.basis)


@given(systems)
def test_closures_are_fixed_points(sysdata):
    A, B, H = (ex.qmat(x) for x in sysdata)
    trace: list = []
    c = ss.a_invariant_closure(H, A, trace)
    assert c.contains(H)
    assert ss.a_invariant_closure(c, A) == c
    assert ss.is_A_invariant(c, A).residual == 0
    assert trace == sorted(trace) and len(trace) <= A.shape[0] + 1
    ab, F = ss.ab_invariant_closure(H, A, B)
    assert ab.contains(H)
    assert ss.ab_invariant_closure(ab, A, B)[0] == ab
    assert ss.is_ab_invariant(ab, A, B).residual == 0


@given(systems)
def test_duality_of_invariance(sysdata):
    A, _, H = (ex.qmat(x) for x in sysdata)
    K = ss.perp(ss.row_space(H))
    dual = ss.is_A_invariant(ss.row_space(H), A) is not None
    primal = K.contains(A @ K.basis) if K.dim else True
    assert dual == primal


@given(systems)
def test_perp_involution_and_dimensions(sysdata):
    _, _, H = sysdata
    S = ss.row_space(H)
    assert S.dim + ss.perp(S).dim == S.ambient
    assert ss.perp(ss.perp(S)) == S


@given(systems)
def test_preimage_definition(sysdata):
    A, _, H = (ex.qmat(x) for x in sysdata)
    S = ss.perp(ss.row_space(H))
    P = ss.preimage(A, S)
    if P.dim:
        assert S.contains(A @ P.basis)
    # maximal: x is in the preimage iff H A x = 0
    assert P.dim == A.shape[1] - oracles.rank(ss.row_space(H).basis @ A)
