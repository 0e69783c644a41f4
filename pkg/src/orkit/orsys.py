"""Observer-based realizations (OR-systems) of linear and singular systems.

An OR-system is a self-contained dynamic system whose state is a set of
observer functions ``z = W x`` of the original state. The constructions
here range from approximate ones (projection and pseudo-inverse bridges)
to exact ones built on A-invariant and (A,B)-invariant closures.

Constructions that depend on subspace computations always run in exact
rational arithmetic; the bridge-based ones stay exact for rational input
and fall back to floats otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exact as ex
from . import subspace as ss
from .dkstp import Bridge, bridge_matrix
from .errors import ShapeError
from .xspace import EPS_EQ

TIMES = ("continuous", "discrete")
KINDS = ("approx_projection", "approx_pseudoinverse", "exact", "extended", "feedback", "singular")


def coerce(M, column: bool = False) -> np.ndarray:
    """Rational input becomes a Fraction matrix, anything else a float matrix."""
    a = np.asarray(M, dtype=object)
    if a.ndim == 1:
        a = a.reshape(-1, 1) if column else a.reshape(1, -1)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got {a.ndim}-d input")
    if ex.is_rational_input(a):
        return ex.qmat(a)
    return np.asarray(a, dtype=float)


def _exact(*Ms) -> bool:
    return all(isinstance(M, np.ndarray) and M.dtype == object for M in Ms)


def _q(M):
    return M if M.dtype == object else ex.qmat(M)


def _residual(M) -> float:
    return ex.frobenius(M)


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """``x' = A x + B u``, ``y = H x`` (or the discrete-time analogue)."""

    A: np.ndarray
    B: np.ndarray
    H: np.ndarray
    time: str = "continuous"
    disturbances: tuple = ()

    def __post_init__(self):
        A, B, H = coerce(self.A), coerce(self.B, column=True), coerce(self.H)
        n = A.shape[0]
        if A.shape != (n, n) or n < 1:
            raise ShapeError(f"A must be square, got {A.shape}")
        if B.shape[0] != n or B.shape[1] < 1:
            raise ShapeError(f"B must have {n} rows, got {B.shape}")
        if H.shape[1] != n or H.shape[0] < 1:
            raise ShapeError(f"H must have {n} columns, got {H.shape}")
        if self.time not in TIMES:
            raise ValueError(f"time must be one of {TIMES}, got {self.time!r}")
        dist = tuple(coerce(d, column=True) for d in self.disturbances)
        for d in dist:
            if d.shape != (n, 1):
                raise ShapeError(f"disturbance must be an {n}-vector, got {d.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "disturbances", dist)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.H.shape[0]

    @property
    def is_exact(self) -> bool:
        return _exact(self.A, self.B, self.H)

    def exact(self) -> "LinearSystem":
        """Copy with all matrices as Fractions (floats are rationalized)."""
        return LinearSystem(_q(self.A), _q(self.B), _q(self.H), self.time,
                            tuple(_q(d) for d in self.disturbances))


@dataclass(frozen=True, eq=False)
class SingularSystem:
    """``E x' = A x + B u`` together with the algebraic constraint ``Falg x + D u = 0``."""

    E: np.ndarray
    Falg: np.ndarray
    A: np.ndarray
    B: np.ndarray
    D: np.ndarray | None = None
    time: str = "continuous"

    def __post_init__(self):
        E, Fa, A, B = coerce(self.E), coerce(self.Falg), coerce(self.A), coerce(self.B, column=True)
        r, n = E.shape
        if Fa.shape != (n - r, n):
            raise ShapeError(f"Falg must be {(n - r, n)}, got {Fa.shape}")
        if A.shape != (r, n):
            raise ShapeError(f"A must be {(r, n)}, got {A.shape}")
        if B.shape[0] != r:
            raise ShapeError(f"B must have {r} rows, got {B.shape}")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "Falg", Fa)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if self.D is not None:
            D = coerce(self.D, column=True)
            if D.shape != (n - r, B.shape[1]):
                raise ShapeError(f"D must be {(n - r, B.shape[1])}, got {D.shape}")
            object.__setattr__(self, "D", D)
        if self.time not in TIMES:
            raise ValueError(f"time must be one of {TIMES}, got {self.time!r}")

    @property
    def theta(self) -> np.ndarray:
        return np.vstack([self.E, self.Falg])

    @property
    def r(self) -> int:
        return self.E.shape[0]

    @property
    def n(self) -> int:
        return self.E.shape[1]

    @property
    def m(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True, eq=False)
class SOSystem:
    """Observer dynamics written in the original state: ``y' = M x + N u``."""

    M: np.ndarray
    N: np.ndarray

    def __post_init__(self):
        M, N = coerce(self.M), coerce(self.N, column=True)
        if M.shape[0] != N.shape[0]:
            raise ShapeError(f"M and N row counts differ: {M.shape} vs {N.shape}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "N", N)


@dataclass(frozen=True, eq=False)
class ORSystem:
    """A self-contained realization ``z' = L z + N u`` of chosen observers.

    ``observer_map`` W gives ``z = W x`` (None when only the SO-system was
    known). ``selector`` S recovers the original outputs as ``y = S z``.
    ``init`` names how the initial OR state is formed: ``observer`` (z0 = W x0)
    or ``project`` (z0 = Psi y0 for an observation y0 of any dimension).
    """

    kind: str
    L: np.ndarray
    N: np.ndarray
    observer_map: np.ndarray | None
    selector: np.ndarray
    feedback_F: np.ndarray | None = None
    exactness: str = "approximate"
    init: str = "observer"
    residual: float = 0.0
    time: str = "continuous"
    bridge: Bridge | None = field(default=None, repr=False)
    notes: tuple = ()

    @property
    def dim(self) -> int:
        return self.L.shape[0]

    def initial_state(self, x0=None, y0=None) -> np.ndarray:
        """OR initial state from a full state ``x0`` or an observation ``y0``."""
        if self.init == "project" or self.observer_map is None:
            if y0 is None:
                raise ValueError("this OR-system is initialized from an observation y0")
            y0 = np.asarray(y0, dtype=float).reshape(-1)
            return np.asarray(bridge_matrix(self.bridge, self.dim, y0.size), dtype=float) @ y0
        if x0 is None:
            raise ValueError("this OR-system is initialized from a state x0")
        return np.asarray(self.observer_map, dtype=float) @ np.asarray(x0, dtype=float).reshape(-1)

    def as_linear(self) -> LinearSystem:
        """The OR-system viewed as a plain linear system with output ``selector``."""
        return LinearSystem(self.L, self.N, self.selector, self.time)

    def verify(self, sys: LinearSystem) -> dict:
        """Residuals of ``W (A + B F) = L W`` and ``W B = N`` against ``sys``."""
        if self.observer_map is None:
            raise ValueError("no observer map to verify against")
        W = self.observer_map
        exact = _exact(W, self.L, self.N, sys.A, sys.B)
        A, B = (sys.A, sys.B) if exact else (np.asarray(sys.A, float), np.asarray(sys.B, float))
        Ac = A if self.feedback_F is None else A + B @ self.feedback_F
        return {
            "dynamics": _residual(W @ Ac - self.L @ W),
            "input": _residual(W @ B - self.N),
            "selector": _residual(self.selector @ W - (sys.H if exact else np.asarray(sys.H, float))),
        }


# --------------------------------------------------------------------------
# SO-system and approximate constructions


def so_system(sys: LinearSystem) -> SOSystem:
    return SOSystem(sys.H @ sys.A, sys.H @ sys.B)


def or_projection(so: SOSystem, bridge: Bridge | None = None, time: str = "continuous") -> ORSystem:
    """``L = M Psi[n, p]``: close the SO-system by bridging R^p back to R^n."""
    b = bridge if bridge is not None else Bridge.projecting()
    M, N = so.M, so.N
    p, n = M.shape
    exact = _exact(M, N) and b.can_be_exact()
    Psi = bridge_matrix(b, n, p, exact=exact)
    if not exact:
        M, N = np.asarray(M, float), np.asarray(N, float)
    I = ex.eye(p) if exact else np.eye(p)
    return ORSystem("approx_projection", M @ Psi, N, None, I, init="project",
                    time=time, bridge=b)


def pseudo_inverse(H) -> np.ndarray:
    """Moore-Penrose inverse; exact for rational input, SVD otherwise."""
    H = coerce(H)
    if H.dtype == object:
        return ex.pinv(H)
    return np.linalg.pinv(H)


def or_pseudoinverse(sys: LinearSystem, tol: float = EPS_EQ) -> ORSystem:
    """``L = H A H+``, ``N = H B``; exact precisely when Row(H) is A-invariant.

    Rational systems are judged exactly; floating ones by ``residual <= tol``.
    """
    A, B, H = sys.A, sys.B, sys.H
    if not sys.is_exact:
        A, B, H = (np.asarray(M, float) for M in (A, B, H))
    Hp = pseudo_inverse(H)
    L = H @ A @ Hp
    res = _residual(L @ H - H @ A)
    exact = res == 0 if sys.is_exact else res <= tol
    I = ex.eye(sys.p) if sys.is_exact else np.eye(sys.p)
    return ORSystem("approx_pseudoinverse", L, H @ B, H, I,
                    exactness="exact" if exact else "approximate",
                    residual=res, time=sys.time)


def or_singular(sys: SingularSystem, cond_max: float = 1e12) -> ORSystem:
    """OR-system in ``y = E x`` using the first r columns of the inverse of Theta.

    With an input term in the constraint, ``x ≈ Psi_+ y + Dt u`` where
    ``Dt = -Theta+[:, r:] D``, which adds ``A Dt`` to the input matrix.
    """
    Th = sys.theta
    r, n = sys.r, sys.n
    exact_mode = _exact(Th, sys.A, sys.B) and (sys.D is None or _exact(sys.D))
    if exact_mode:
        Tp = ex.pinv(Th)
        invertible = ex.rank(Th) == n
        A, B, E = sys.A, sys.B, sys.E
    else:
        Thf = np.asarray(Th, float)
        Tp = np.linalg.pinv(Thf)
        invertible = np.linalg.matrix_rank(Thf) == n and np.linalg.cond(Thf) < cond_max
        A, B, E = (np.asarray(M, float) for M in (sys.A, sys.B, sys.E))
    Psi = Tp[:, :r]
    N = B
    if sys.D is not None:
        D = sys.D if exact_mode else np.asarray(sys.D, float)
        N = B + A @ (-Tp[:, r:] @ D)
    I = ex.eye(r) if exact_mode else np.eye(r)
    return ORSystem("singular", A @ Psi, N, E, I,
                    exactness="exact" if invertible else "approximate",
                    time=sys.time, notes=(("psi", Psi),))


# --------------------------------------------------------------------------
# exact constructions


def or_exact(sys: LinearSystem) -> ORSystem | None:
    """``L = H A H+``, present iff Row(H) is A-invariant."""
    s = sys.exact()
    if ss.is_A_invariant(s.H, s.A) is None:
        return None
    L = s.H @ s.A @ ex.pinv(s.H)
    res = _residual(L @ s.H - s.H @ s.A)
    return ORSystem("exact", L, s.H @ s.B, s.H, ex.eye(s.p), exactness="exact",
                    residual=res, time=s.time)


def _selector(W, H) -> np.ndarray:
    S = ex.solve_left(W, H)
    if S is None:
        raise RuntimeError("observer rows are not in the closure")
    return S


def or_extended(sys: LinearSystem) -> ORSystem:
    """OR-system on the A-invariant closure of Row(H).

    The state rows are H followed by the new independent rows of
    H A, H A^2, ..., so the selector is ``[I_p 0]`` for full-row-rank H.
    """
    s = sys.exact()
    W = ss.krylov_rows(s.H, s.A)
    L = ss.solve_xi(W, W @ s.A)
    res = _residual(W @ s.A - L @ W)
    return ORSystem("extended", L, W @ s.B, W, _selector(W, s.H), exactness="exact",
                    residual=res, time=s.time)


def or_feedback(sys: LinearSystem, feedback=None, basis=None) -> ORSystem:
    """OR-system on the (A,B)-invariant closure of Row(H) under ``u = F x + v``.

    ``feedback`` and ``basis`` override the computed friend and the state
    rows; both are checked before use.
    """
    s = sys.exact()
    closure, F = ss.ab_invariant_closure(s.H, s.A, s.B)
    V = ss.perp(closure)
    if feedback is not None:
        F = ex.qmat(np.atleast_2d(np.asarray(feedback, dtype=object)))
        if F.shape != (s.m, s.n):
            raise ShapeError(f"feedback must be {(s.m, s.n)}, got {F.shape}")
        if not V.contains((s.A + s.B @ F) @ V.basis):
            raise ValueError("supplied feedback does not render the closure invariant")
    if basis is not None:
        W = ex.qmat(np.atleast_2d(np.asarray(basis, dtype=object)))
        if ex.rank(W) != W.shape[0] or ss.DualSubspace.of(W, s.n) != closure:
            raise ValueError("supplied basis does not span the (A,B)-invariant closure")
    else:
        W = ss.extend_rows(s.H, closure)
    Ac = s.A + s.B @ F
    L = ss.solve_xi(W, W @ Ac)
    res = _residual(W @ Ac - L @ W)
    return ORSystem("feedback", L, W @ s.B, W, _selector(W, s.H), feedback_F=F,
                    exactness="exact", residual=res, time=s.time)


# --------------------------------------------------------------------------
# comparison tools


def controllable_subspace(A, B) -> ss.Subspace:
    A = _q(coerce(A))
    B = _q(coerce(B, column=True))
    n = A.shape[0]
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(A @ blocks[-1])
    return ss.Subspace.of(np.hstack(blocks), n)


def kalman_minimal(sys: LinearSystem) -> LinearSystem:
    """Controllable-and-observable part ``(A11, B1, C1)`` of the system.

    Coordinates are read off the canonical bases: on the controllable
    subspace by its pivot rows, on the observable quotient by the pivot
    columns of the canonical observability rows. With ``B = 0`` only the
    observable part is taken.
    """
    s = sys.exact()
    if ex.is_zero(s.B):
        Ac, Bc, Cc = s.A, s.B, s.H
    else:
        T = controllable_subspace(s.A, s.B)
        piv = T.pivots()
        Ac = (s.A @ T.basis)[piv, :]
        Bc = s.B[piv, :]
        Cc = s.H @ T.basis
    R = ss.a_invariant_closure(Cc, Ac).basis
    if R.shape[0] == 0:
        raise ValueError("system has no observable controllable part")
    pc = ex.rref(R)[1]
    return LinearSystem((R @ Ac)[:, pc], R @ Bc, Cc[:, pc], s.time)


def markov_parameters(sys: LinearSystem, count: int) -> list:
    """``[H B, H A B, ..., H A^(count-1) B]``."""
    out = []
    M = sys.B
    for _ in range(count):
        out.append(sys.H @ M)
        M = sys.A @ M
    return out


@dataclass(frozen=True)
class DDPResult:
    solvable: bool
    V: ss.Subspace
    observer_map: np.ndarray | None = None

    def __bool__(self):
        return self.solvable


def ddp_check(sys: LinearSystem, disturbances=None) -> DDPResult:
    """Disturbance decoupling: every disturbance direction must lie in the
    largest (A,B)-invariant subspace inside ker H. When solvable, the
    feedback OR-system's observer map annihilates each direction."""
    s = sys.exact()
    dist = s.disturbances if disturbances is None else tuple(
        ex.qmat(np.asarray(d, dtype=object).reshape(-1, 1)) for d in disturbances)
    V = ss.largest_ab_invariant_in(s.A, s.B, ss.perp(ss.row_space(s.H)))
    ok = all(V.contains(d) for d in dist)
    if not ok:
        return DDPResult(False, V)
    W = or_feedback(s).observer_map
    for d in dist:
        if not ex.is_zero(W @ d):
            raise AssertionError("feedback OR-system does not annihilate a decoupled disturbance")
    return DDPResult(True, V, W)
