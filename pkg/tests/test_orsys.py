import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from orkit import exact as ex
from orkit import orsys
from orkit import subspace as ss
from orkit.dkstp import Bridge
from orkit.errors import ShapeError
from orkit.io import parse_matrix
from orkit.xspace import projection_matrix


def printed(ld, key, column=False):
    return parse_matrix(ld.get("printed")[key], column=column)


def test_exact_construction(examples):
    ld = examples["exact_invariant"]
    o = orsys.or_exact(ld.record)
    assert o.exactness == "exact" and o.residual == 0
    assert np.array_equal(o.L, printed(ld, "Xi"))
    assert np.array_equal(o.N, printed(ld, "CB", column=True))
    assert all(v == 0 for v in o.verify(ld.record).values())


def test_pseudoinverse_coincides_when_invariant(examples):
    ld = examples["exact_invariant"]
    p = orsys.or_pseudoinverse(ld.record)
    assert p.exactness == "exact"
    assert np.array_equal(p.L, orsys.or_exact(ld.record).L)


def test_extended_construction(examples):
    ld = examples["extended_closure"]
    assert orsys.or_exact(ld.record) is None
    o = orsys.or_extended(ld.record)
    assert np.array_equal(o.observer_map, printed(ld, "H"))
    assert np.array_equal(o.L, printed(ld, "A_tilde"))
    assert np.array_equal(o.N, printed(ld, "B_tilde", column=True))
    assert o.selector.tolist() == [[1, 0, 0, 0, 0]]
    assert all(v == 0 for v in o.verify(ld.record).values())


def test_pseudoinverse_is_approximate_when_not_invariant(examples):
    p = orsys.or_pseudoinverse(examples["extended_closure"].record)
    assert p.exactness == "approximate" and p.residual > 0


def test_feedback_construction_with_printed_data(examples):
    ld = examples["feedback_closure"]
    o = orsys.or_feedback(ld.record, ld.get("feedback"), ld.get("basis"))
    assert all(v == 0 for v in o.verify(ld.record).values())
    # rows 2 and 3 of the printed Xi agree; the first row and N are corrected
    assert np.array_equal(o.L[1:], printed(ld, "Xi")[1:])
    assert o.L[0].tolist() == [1, -1, 0]
    assert o.N.tolist() == [[0], [0], [-1]]


def test_feedback_construction_default(examples):
    ld = examples["feedback_closure"]
    o = orsys.or_feedback(ld.record)
    assert o.dim == 3 and o.residual == 0
    assert np.array_equal(o.observer_map[:1], ld.record.H)
    assert all(v == 0 for v in o.verify(ld.record).values())


def test_feedback_rejects_bad_overrides(examples):
    sys = examples["feedback_closure"].record
    with pytest.raises(ShapeError):
        orsys.or_feedback(sys, feedback=[[1, 2]])
    with pytest.raises(ValueError):
        orsys.or_feedback(sys, feedback=[[0, 0, 0, 0, 0, 0]])
    with pytest.raises(ValueError):
        orsys.or_feedback(sys, basis=[[1, 0, 0, 0, 1, 0]])


def test_kalman_minimal_matches_printed(examples):
    ld = examples["feedback_closure"]
    k = orsys.kalman_minimal(ld.record)
    assert np.array_equal(k.A, printed(ld, "kalman_A"))
    assert np.array_equal(k.B, printed(ld, "kalman_B", column=True))
    assert np.array_equal(k.H, printed(ld, "kalman_C"))


def test_kalman_minimal_preserves_markov_parameters(examples):
    sys = examples["feedback_closure"].record
    k = orsys.kalman_minimal(sys)
    for a, b in zip(orsys.markov_parameters(sys, 8), orsys.markov_parameters(k, 8)):
        assert np.array_equal(a, b)


def test_identity_observers_reduce_to_the_system():
    A = ex.qmat([[1, 2], [3, 4]])
    B = ex.qmat([[1], [0]])
    sys = orsys.LinearSystem(A, B, ex.eye(2))
    for o in (orsys.or_exact(sys), orsys.or_extended(sys), orsys.or_pseudoinverse(sys)):
        assert np.array_equal(o.L, A) and np.array_equal(o.N, B)
    f = orsys.or_feedback(sys)
    assert f.dim == 2 and np.array_equal(f.L, A + B @ f.feedback_F)


def test_projection_construction(examples):
    ld = examples["so_projection"]
    so = ld.record
    o = orsys.or_projection(so)
    Pi = projection_matrix(2, 5, exact=True)
    assert np.array_equal(o.L, so.M @ Pi)
    assert np.array_equal(o.L, printed(ld, "L") * ex.to_fraction("2.5"))
    assert np.array_equal(o.N, printed(ld, "N", column=True))
    z0 = o.initial_state(y0=[1, 2, 0, -2, -1, -1])
    assert np.allclose(z0, [1, -4 / 3])


def test_projection_with_default_bridge():
    so = orsys.SOSystem([[1, 0, 2]], [[1]])
    o = orsys.or_projection(so, Bridge.default())
    assert np.allclose(np.asarray(o.L, float), np.asarray(so.M, float) @ oracles.default_bridge(3, 1))


def test_projection_from_linear_system(examples):
    sys = examples["exact_invariant"].record
    so = orsys.so_system(sys)
    assert np.array_equal(so.M, sys.H @ sys.A)
    assert orsys.or_projection(so).dim == 2


def test_singular_invertible(examples):
    ld = examples["singular_invertible"]
    o = orsys.or_singular(ld.record)
    psi = dict(o.notes)["psi"]
    assert o.exactness == "exact"
    assert np.array_equal(psi, printed(ld, "Psi"))
    Th = ld.record.theta
    assert np.array_equal(Th @ psi, np.vstack([ex.eye(2), ex.zeros(2, 2)]))


def test_singular_deficient(examples):
    ld = examples["singular_deficient"]
    o = orsys.or_singular(ld.record)
    assert o.exactness == "approximate"
    psi = dict(o.notes)["psi"]
    assert np.array_equal(psi, ex.pinv(ld.record.theta)[:, :2])
    assert psi[2, 1] == ex.to_fraction("-0.175")


def test_singular_identity_theta():
    E = ex.qmat([[1, 0, 0], [0, 1, 0]])
    Falg = ex.qmat([[0, 0, 1]])
    A = ex.qmat([[1, 2, 3], [4, 5, 6]])
    sys = orsys.SingularSystem(E, Falg, A, [[1], [0]])
    o = orsys.or_singular(sys)
    assert o.exactness == "exact"
    assert np.array_equal(o.L, A[:, :2])


def test_singular_input_term():
    E = ex.qmat([[1, 0, 0], [0, 1, 0]])
    Falg = ex.qmat([[0, 0, 1]])
    A = ex.qmat([[0, 0, 1], [0, 0, 0]])
    sys = orsys.SingularSystem(E, Falg, A, [[0], [0]], D=[[1]])
    # constraint x3 + u = 0 feeds -u into y1'
    assert orsys.or_singular(sys).N.tolist() == [[-1], [0]]


def test_ddp(examples):
    sys = examples["feedback_closure"].record
    res = orsys.ddp_check(sys)
    assert res and ex.is_zero(res.observer_map @ sys.disturbances[0])
    assert not orsys.ddp_check(sys, [[1, 0, 0, 0, 0, 0]])
    assert orsys.ddp_check(sys, []).solvable


def test_zero_input_matrix():
    A = ex.qmat([[0, 1], [0, 0]])
    sys = orsys.LinearSystem(A, [[0], [0]], [[0, 1]])
    o = orsys.or_exact(sys)
    assert o.L.tolist() == [[0]] and o.N.tolist() == [[0]]
    k = orsys.kalman_minimal(orsys.LinearSystem(A, [[0], [0]], [[1, 0]]))
    assert k.n == 2
    f = orsys.or_feedback(orsys.LinearSystem(A, [[0], [0]], [[1, 0]]))
    assert f.dim == 2


def test_float_systems_use_floating_constructions():
    sys = orsys.LinearSystem(np.array([[0.5, 0.0], [0.0, 2.0]]), np.array([[1.0], [1.0]]),
                             np.array([[1.0, 0.0]]))
    p = orsys.or_pseudoinverse(sys)
    assert p.L.dtype != object
    assert np.allclose(p.L, [[0.5]])


def test_shape_errors():
    with pytest.raises(ShapeError):
        orsys.LinearSystem([[1, 0]], [[1]], [[1, 0]])
    with pytest.raises(ShapeError):
        orsys.SOSystem([[1, 0]], [[1], [2]])


# properties

small = st.integers(-2, 2)
systems = st.integers(2, 5).flatmap(lambda n: st.tuples(
    st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(st.lists(small, min_size=1, max_size=1), min_size=n, max_size=n),
    st.lists(st.lists(small, min_size=n, max_size=n), min_size=1, max_size=2)))


@given(systems)
def test_pseudoinverse_exact_iff_invariant(data):
    A, B, H = data
    sys = orsys.LinearSystem(ex.qmat(A), ex.qmat(B), ex.qmat(H))
    if ex.rank(sys.H) < sys.p:
        return
    p = orsys.or_pseudoinverse(sys)
    invariant = ss.is_A_invariant(sys.H, sys.A) is not None
    assert (p.exactness == "exact") == invariant
    assert (orsys.or_exact(sys) is not None) == invariant


@given(systems)
def test_certificates_have_zero_residual(data):
    A, B, H = data
    sys = orsys.LinearSystem(ex.qmat(A), ex.qmat(B), ex.qmat(H))
    ext = orsys.or_extended(sys)
    fb = orsys.or_feedback(sys)
    assert ext.residual == 0 and fb.residual == 0
    assert all(v == 0 for v in ext.verify(sys).values())
    assert all(v == 0 for v in fb.verify(sys).values())
    assert fb.dim <= ext.dim <= sys.n
