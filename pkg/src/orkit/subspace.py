"""Exact subspace computations for linear observers and controlled invariance.

Rows of an observer matrix ``H`` are linear functionals on the state space;
their span is a ``DualSubspace``. Column spans are ``Subspace`` objects.
Both keep a canonical rational basis (reduced row-echelon form), so equality
of subspaces is equality of bases. Float inputs are rationalized with a
``RationalizationWarning``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exact as ex


def _q(M) -> np.ndarray:
    if isinstance(M, np.ndarray) and M.dtype == object:
        return M
    return ex.qmat(M)


def _qcol(M, n=None) -> np.ndarray:
    a = np.asarray(M, dtype=object)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    return _q(a)


@dataclass(frozen=True, eq=False)
class DualSubspace:
    """Span of the rows of ``basis`` (r x n, reduced row-echelon form)."""

    ambient: int
    basis: np.ndarray

    @classmethod
    def of(cls, H, ambient: int | None = None) -> "DualSubspace":
        H = _q(np.asarray(H, dtype=object))
        if ambient is None:
            ambient = H.shape[1]
        if H.size == 0:
            return cls(ambient, ex.zeros(0, ambient))
        return cls(ambient, ex.row_basis(H))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, rows) -> bool:
        R = _q(np.atleast_2d(np.asarray(rows, dtype=object)))
        if R.size == 0:
            return True
        return ex.rank(np.vstack([self.basis, R])) == self.dim

    def __add__(self, other: "DualSubspace") -> "DualSubspace":
        return DualSubspace.of(np.vstack([self.basis, other.basis]), self.ambient)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DualSubspace):
            return NotImplemented
        return (self.ambient == other.ambient and self.basis.shape == other.basis.shape
                and all(a == b for a, b in zip(self.basis.flat, other.basis.flat)))

    def __hash__(self):
        return hash((self.ambient, tuple(self.basis.flat)))

    def __repr__(self):
        return f"DualSubspace(dim={self.dim}, ambient={self.ambient}, basis={ex.to_jsonable(self.basis)})"


@dataclass(frozen=True, eq=False)
class Subspace:
    """Span of the columns of ``basis`` (n x r), canonical up to transposition."""

    ambient: int
    basis: np.ndarray

    @classmethod
    def of(cls, V, ambient: int | None = None) -> "Subspace":
        V = _qcol(V)
        if ambient is None:
            ambient = V.shape[0]
        if V.size == 0:
            return cls(ambient, ex.zeros(ambient, 0))
        return cls(ambient, ex.row_basis(V.T).T.copy())

    @classmethod
    def whole(cls, n: int) -> "Subspace":
        return cls(n, ex.eye(n))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ex.zeros(n, 0))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def pivots(self) -> list[int]:
        return ex.rref(self.basis.T)[1] if self.dim else []

    def contains(self, vectors) -> bool:
        X = _qcol(vectors)
        if X.size == 0:
            return True
        return ex.rank(np.hstack([self.basis, X])) == self.dim

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.of(np.hstack([self.basis, other.basis]), self.ambient)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersection(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient == other.ambient and self.basis.shape == other.basis.shape
                and all(a == b for a, b in zip(self.basis.flat, other.basis.flat)))

    def __hash__(self):
        return hash((self.ambient, tuple(self.basis.flat)))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient}, basis={ex.to_jsonable(self.basis)})"


@dataclass(frozen=True)
class InvarianceCertificate:
    """``H A_closed = Xi H`` with ``A_closed = A + B F`` (``F`` None means 0)."""

    xi: np.ndarray
    residual: float
    F: np.ndarray | None = None
    H: np.ndarray | None = field(default=None, repr=False)


def row_space(H) -> DualSubspace:
    return DualSubspace.of(H)


def col_space(V) -> Subspace:
    return Subspace.of(V)


def perp(S):
    """Annihilator: a DualSubspace maps to a Subspace and vice versa."""
    if isinstance(S, DualSubspace):
        if S.dim == 0:
            return Subspace.whole(S.ambient)
        return Subspace.of(ex.nullspace(S.basis), S.ambient)
    if isinstance(S, Subspace):
        if S.dim == 0:
            return DualSubspace(S.ambient, ex.eye(S.ambient))
        return DualSubspace.of(ex.nullspace(S.basis.T).T, S.ambient)
    raise TypeError(f"perp expects a subspace, got {type(S).__name__}")


def intersection(S: Subspace, T: Subspace) -> Subspace:
    return perp(perp(S) + perp(T))


def image(M, S: Subspace) -> Subspace:
    M = _q(M)
    return Subspace.of(M @ S.basis, M.shape[0])


def _rows(H) -> np.ndarray:
    if isinstance(H, DualSubspace):
        return H.basis
    return _q(np.atleast_2d(np.asarray(H, dtype=object)))


def _closed(A, B=None, F=None):
    A = _q(A)
    if F is None or B is None:
        return A
    return A + _q(B) @ _q(F)


def solve_xi(H, M):
    """Exact ``Xi`` with ``Xi H = M``, or None when the rows of M leave Row(H)."""
    H = _rows(H)
    M = _q(M)
    if H.shape[0] == 0:
        return ex.zeros(M.shape[0], 0) if ex.is_zero(M) else None
    return ex.solve_left(H, M)


def is_A_invariant(H, A) -> InvarianceCertificate | None:
    """Certificate ``Xi`` with ``Xi H = H A``, or None when Row(H) is not A-invariant.

    A DualSubspace is tested in its canonical basis; a raw matrix is used as
    given, so ``Xi`` refers to the caller's rows.
    """
    Hm = _rows(H)
    A = _q(A)
    M = Hm @ A
    xi = solve_xi(Hm, M)
    if xi is None:
        return None
    return InvarianceCertificate(xi, ex.frobenius(Hm @ A - xi @ Hm), None, Hm)


def krylov_rows(H, A, trace: list | None = None) -> np.ndarray:
    """Rows of H followed by the new independent rows of H A, H A^2, ...

    The span is the smallest A-invariant dual subspace containing Row(H).
    Rows of H that are dependent on earlier ones are dropped. If ``trace``
    is a list, the dimension after each sweep is appended to it.
    """
    Hm = _rows(H)
    A = _q(A)
    n = A.shape[0]
    kept = ex.zeros(0, n)
    for row in Hm:
        cand = np.vstack([kept, row.reshape(1, -1)])
        if ex.rank(cand) > kept.shape[0]:
            kept = cand
    frontier = kept
    if trace is not None:
        trace.append(kept.shape[0])
    while frontier.shape[0]:
        added = []
        for row in frontier @ A:
            cand = np.vstack([kept, row.reshape(1, -1)])
            if ex.rank(cand) > kept.shape[0]:
                kept = cand
                added.append(row)
        frontier = np.array(added, dtype=object).reshape(len(added), n)
        if trace is not None:
            trace.append(kept.shape[0])
    return kept


def a_invariant_closure(H, A, trace: list | None = None) -> DualSubspace:
    """Smallest A-invariant dual subspace containing Row(H)."""
    A = _q(A)
    return DualSubspace.of(krylov_rows(H, A, trace), A.shape[0])


def preimage(A, S: Subspace) -> Subspace:
    """``{x : A x in S}`` computed as the annihilator of ``A^T S^perp``."""
    A = _q(A)
    Sp = perp(S)
    if Sp.dim == 0:
        return Subspace.whole(A.shape[1])
    return perp(DualSubspace.of(Sp.basis @ A, A.shape[1]))


@dataclass(frozen=True)
class ChainStep:
    """One pass of the largest-controlled-invariant iteration."""

    S: Subspace
    S_perp: DualSubspace
    At_S_perp: DualSubspace
    preimage: Subspace
    V: Subspace


def largest_ab_invariant_in(A, B, X: Subspace, trace: list | None = None) -> Subspace:
    """Largest subspace V of X with ``A V ⊆ V + Im B``.

    Iterates ``V_k = X ∩ A^{-1}(Im B + V_{k-1})`` from ``V_0 = X``. If
    ``trace`` is a list, one ``ChainStep`` per pass is appended.
    """
    A = _q(A)
    Bs = col_space(_qcol(B))
    n = A.shape[0]
    if not isinstance(X, Subspace):
        X = Subspace.of(X, n)
    V = X
    for _ in range(n + 1):
        S = Bs + V
        Sp = perp(S)
        AtSp = DualSubspace.of(Sp.basis @ A, n) if Sp.dim else DualSubspace(n, ex.zeros(0, n))
        pre = perp(AtSp)
        Vn = intersection(X, pre)
        if trace is not None:
            trace.append(ChainStep(S, Sp, AtSp, pre, Vn))
        if Vn == V:
            return V
        V = Vn
    raise RuntimeError("controlled-invariant iteration failed to stabilize")


def friend(A, B, V) -> np.ndarray | None:
    """A feedback F (m x n) with ``(A + B F) V ⊆ V``, or None if none exists.

    For each canonical basis vector v_i solve ``A v_i = V w_i - B u_i`` and set
    ``F v_i = u_i``; F vanishes on the unit vectors outside V's pivot rows.
    """
    A = _q(A)
    B = _qcol(B)
    n, m = B.shape
    if not isinstance(V, Subspace):
        V = Subspace.of(V, n)
    if V.dim == 0:
        return ex.zeros(m, n)
    Vb = V.basis
    r = V.dim
    sol = ex.solve_right(np.hstack([Vb, -B]), A @ Vb)
    if sol is None:
        return None
    U = sol[r:, :]
    piv = V.pivots()
    free = [j for j in range(n) if j not in piv]
    basis = np.hstack([Vb, ex.eye(n)[:, free]])
    images = np.hstack([U, ex.zeros(m, len(free))])
    return images @ ex.inverse(basis)


def is_ab_invariant(H, A, B) -> InvarianceCertificate | None:
    """Certificate (Xi, F) with ``H (A + B F) = Xi H``, or None.

    Holds iff ``A H^perp ⊆ H^perp + Im B``.
    """
    Hm = _rows(H)
    A = _q(A)
    n = A.shape[0]
    W = perp(DualSubspace.of(Hm, n))
    F = friend(A, B, W)
    if F is None:
        return None
    Ac = _closed(A, _qcol(B), F)
    xi = solve_xi(Hm, Hm @ Ac)
    if xi is None:
        return None
    return InvarianceCertificate(xi, ex.frobenius(Hm @ Ac - xi @ Hm), F, Hm)


def ab_invariant_closure(H, A, B):
    """Smallest (A,B)-invariant dual subspace containing Row(H), with a friend."""
    A = _q(A)
    n = A.shape[0]
    W = largest_ab_invariant_in(A, B, perp(DualSubspace.of(_rows(H), n)))
    return perp(W), friend(A, B, W)


def extend_rows(H, S: DualSubspace) -> np.ndarray:
    """Rows of H (independent part) followed by canonical rows of S completing them."""
    Hm = _rows(H)
    kept = ex.zeros(0, S.ambient)
    for row in np.vstack([Hm, S.basis]):
        cand = np.vstack([kept, row.reshape(1, -1)])
        if ex.rank(cand) > kept.shape[0]:
            kept = cand
    return kept
