"""Exact rational matrix arithmetic on numpy object arrays of ``Fraction``.

Everything here works on 2-D ``dtype=object`` arrays whose entries are
``fractions.Fraction``. numpy's ``@``, ``+`` and slicing work unchanged on
such arrays; only elimination needs hand-written loops.
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import RationalizationWarning, ShapeError

MAX_DENOMINATOR = 10**6


def to_fraction(x, max_denominator: int = MAX_DENOMINATOR) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        return Fraction(int(x))
    if isinstance(x, (int, np.integer, Rational)):
        return Fraction(int(x)) if isinstance(x, (int, np.integer)) else Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            raise ValueError(f"cannot rationalize {x}")
        f = Fraction(x)
        g = f.limit_denominator(max_denominator)
        if g != f:
            warnings.warn(
                f"float {x!r} rationalized to {g}", RationalizationWarning, stacklevel=3
            )
        return g
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def qmat(M) -> np.ndarray:
    """Return ``M`` as a 2-D object array of Fractions (copies)."""
    a = np.asarray(M, dtype=object)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got {a.ndim}-d input")
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = to_fraction(v)
    return out


def qvec(v) -> np.ndarray:
    a = np.asarray(v, dtype=object).reshape(-1)
    return np.array([to_fraction(x) for x in a], dtype=object)


def is_exact(M) -> bool:
    """True when ``M`` holds integers or Fractions only."""
    a = np.asarray(M, dtype=object) if not isinstance(M, np.ndarray) else M
    if a.dtype.kind in "iub":
        return True
    if a.dtype.kind != "O":
        return False
    return all(isinstance(v, (int, Fraction, np.integer)) and not isinstance(v, bool)
               for v in a.flat)


def is_rational_input(M) -> bool:
    """True for ints, Fractions and rational strings (no floats)."""
    a = np.asarray(M, dtype=object)
    for v in a.flat:
        if isinstance(v, bool):
            return False
        if isinstance(v, (int, np.integer, Fraction)):
            continue
        if isinstance(v, str):
            try:
                Fraction(v.strip())
            except ValueError:
                return False
            continue
        return False
    return True


def zeros(m: int, n: int) -> np.ndarray:
    out = np.empty((m, n), dtype=object)
    out.fill(Fraction(0))
    return out


def eye(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def to_float(M) -> np.ndarray:
    return np.asarray(M, dtype=float)


def is_zero(M) -> bool:
    return all(v == 0 for v in np.asarray(M, dtype=object).flat)


def frobenius(M) -> float:
    a = np.asarray(M, dtype=float)
    return float(np.sqrt((a * a).sum())) if a.size else 0.0


def rref(M):
    """Reduced row-echelon form. Returns ``(R, pivots)``; ``R`` keeps all rows."""
    A = qmat(M) if not (isinstance(M, np.ndarray) and M.dtype == object) else M
    nrows, ncols = A.shape
    rows = [list(A[i]) for i in range(nrows)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        if p != 1:
            rows[r] = [Fraction(v) / p for v in rows[r]]
        pr = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f != 0:
                    rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    R = np.empty((nrows, ncols), dtype=object)
    for i in range(nrows):
        R[i, :] = [Fraction(v) for v in rows[i]]
    return R, pivots


def rank(M) -> int:
    A = np.asarray(M, dtype=object)
    if A.size == 0:
        return 0
    return len(rref(A)[1])


def row_basis(M) -> np.ndarray:
    """Canonical basis of the row space: the nonzero rows of the RREF."""
    A = np.asarray(M, dtype=object)
    if A.ndim != 2:
        raise ShapeError("row_basis expects a matrix")
    if A.shape[0] == 0:
        return zeros(0, A.shape[1])
    R, piv = rref(A)
    return R[: len(piv)].copy()


def nullspace(M) -> np.ndarray:
    """Column basis (n x k) of ``{x : M x = 0}``, one column per free variable."""
    A = np.asarray(M, dtype=object)
    n = A.shape[1]
    if A.shape[0] == 0:
        return eye(n)
    R, piv = rref(A)
    free = [c for c in range(n) if c not in piv]
    N = zeros(n, len(free))
    for k, f in enumerate(free):
        N[f, k] = Fraction(1)
        for i, c in enumerate(piv):
            N[c, k] = -R[i, f]
    return N


def solve_right(A, B):
    """Particular solution of ``A X = B`` (free variables zero), or None."""
    A = np.asarray(A, dtype=object)
    B = np.asarray(B, dtype=object)
    vec = B.ndim == 1
    if vec:
        B = B.reshape(-1, 1)
    if A.shape[0] != B.shape[0]:
        raise ShapeError(f"row mismatch {A.shape} vs {B.shape}")
    n = A.shape[1]
    if A.shape[0] == 0:
        X = zeros(n, B.shape[1])
        return X[:, 0] if vec else X
    R, piv = rref(np.hstack([A, B]))
    if any(c >= n for c in piv):
        return None
    X = zeros(n, B.shape[1])
    for i, c in enumerate(piv):
        X[c, :] = R[i, n:]
    return X[:, 0] if vec else X


def solve_left(W, M):
    """Particular solution of ``X W = M``, or None."""
    W = np.asarray(W, dtype=object)
    M = np.asarray(M, dtype=object)
    X = solve_right(W.T, M.T)
    return None if X is None else X.T


def inverse(M) -> np.ndarray:
    A = np.asarray(M, dtype=object)
    if A.shape[0] != A.shape[1]:
        raise ShapeError("inverse of a non-square matrix")
    X = solve_right(A, eye(A.shape[0]))
    if X is None or rank(A) < A.shape[0]:
        raise np.linalg.LinAlgError("singular matrix")
    return X


def pinv(H) -> np.ndarray:
    """Moore-Penrose inverse through a full-rank factorization ``H = B C``.

    ``C`` is the nonzero part of the RREF of ``H`` and ``B`` the pivot columns
    of ``H``; then ``H+ = C^T (B^T H C^T)^{-1} B^T``.
    """
    H = qmat(H)
    p, n = H.shape
    R, piv = rref(H)
    r = len(piv)
    if r == 0:
        return zeros(n, p)
    C = R[:r]
    Bf = H[:, piv]
    core = Bf.T @ H @ C.T
    return C.T @ inverse(core) @ Bf.T


def charpoly(M) -> list:
    """Faddeev-LeVerrier coefficients ``[c0, ..., c_{n-1}]`` of ``det(tI - M)``.

    The monic leading coefficient is implicit.
    """
    A = qmat(M)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ShapeError("characteristic polynomial of a non-square matrix")
    coeffs = [Fraction(0)] * n
    Mk = zeros(n, n)
    c_prev = Fraction(1)
    I = eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + c_prev * I
        AM = A @ Mk
        c = -sum(AM[i, i] for i in range(n)) / k
        coeffs[n - k] = c
        c_prev = c
    return coeffs


def fmt(x) -> str:
    """Render a Fraction as ``p`` or ``p/q``; floats pass through repr."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def to_jsonable(M):
    """Nested lists with Fractions rendered as strings and floats kept as floats."""
    a = np.asarray(M, dtype=object)

    def conv(v):
        if isinstance(v, (Fraction, int, np.integer)):
            return fmt(v)
        return float(v)

    if a.ndim == 1:
        return [conv(v) for v in a]
    return [[conv(v) for v in row] for row in a]
