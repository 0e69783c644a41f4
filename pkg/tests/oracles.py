"""Reference computations that do not go through orkit.

Each oracle recomputes a quantity from its definition with a different
tool (sympy exact matrices, numpy least squares, scipy expm, sympy
differentiation), so agreement with the package is evidence rather than
an echo of the same code path.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import scipy.linalg
import sympy


def blow(x, k):
    return np.kron(np.asarray(x, dtype=float), np.ones(k))


def projection_lstsq(m: int, n: int) -> np.ndarray:
    """Columnwise minimizer of ``||xi - x||_V`` over ``x`` in R^n (least squares
    on the lcm-blown-up vectors), for xi running over the unit vectors of R^m."""
    t = math.lcm(m, n)
    K = np.kron(np.eye(n), np.ones((t // n, 1)))
    out = np.empty((n, m))
    for j in range(m):
        target = blow(np.eye(m)[j], t // m)
        out[:, j] = np.linalg.lstsq(K, target, rcond=None)[0]
    return out


def default_bridge(n: int, p: int) -> np.ndarray:
    t = math.lcm(n, p)
    return np.kron(np.eye(n), np.ones((1, t // n))) @ np.kron(np.eye(p), np.ones((t // p, 1)))


def v_inner(x, y) -> float:
    x, y = np.asarray(x, float), np.asarray(y, float)
    t = math.lcm(x.size, y.size)
    return float(blow(x, t // x.size) @ blow(y, t // y.size)) / t


def v_norm(x) -> float:
    return math.sqrt(v_inner(x, x))


def v_sub(x, y) -> np.ndarray:
    x, y = np.asarray(x, float), np.asarray(y, float)
    t = math.lcm(x.size, y.size)
    return blow(x, t // x.size) - blow(y, t // y.size)


def sym(M) -> sympy.Matrix:
    a = np.asarray(M, dtype=object)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    return sympy.Matrix([[sympy.Rational(str(Fraction(v))) for v in row] for row in a])


def rank(M) -> int:
    a = np.asarray(M, dtype=object)
    if a.size == 0:
        return 0
    return sym(a).rank()


def same_row_space(P, Q) -> bool:
    rp, rq = rank(P), rank(Q)
    return rp == rq == rank(np.vstack([np.asarray(P, dtype=object), np.asarray(Q, dtype=object)]))


def same_col_space(P, Q) -> bool:
    return same_row_space(np.asarray(P, dtype=object).T, np.asarray(Q, dtype=object).T)


def pinv(M) -> sympy.Matrix:
    return sym(M).pinv()


def to_np(S: sympy.Matrix) -> np.ndarray:
    return np.array([[Fraction(int(v.p), int(v.q)) for v in S.row(i)] for i in range(S.rows)],
                    dtype=object)


def charpoly_coeffs(M) -> list:
    """``[c0, ..., c_{d-1}]`` of ``det(tI - M)`` via sympy."""
    t = sympy.Symbol("t")
    cs = sym(M).charpoly(t).all_coeffs()[::-1]
    return [Fraction(int(c.p), int(c.q)) for c in cs[:-1]]


def expm(M) -> np.ndarray:
    return scipy.linalg.expm(np.asarray(M, dtype=float))


def nullspace_cols(M) -> sympy.Matrix:
    vs = sym(M).nullspace()
    n = sym(M).cols
    return sympy.Matrix.hstack(*vs) if vs else sympy.zeros(n, 0)


def largest_controlled_invariant(A, B, X) -> sympy.Matrix:
    """Columns spanning the largest V in span(X) with A V ⊆ V + span(B).

    Recomputed with sympy through the equivalent membership test
    ``V_{k+1} = {x in V_k : A x in V_k + B}``.
    """
    A, B, V = sym(A), sym(B), sym(X)
    n = A.rows
    for _ in range(n + 1):
        if V.cols == 0:
            return V
        S = sympy.Matrix.hstack(V, B)
        # x = V c with A V c = S d  <=>  [A V, -S] [c; d] = 0
        K = sympy.Matrix.hstack(A * V, -S).nullspace()
        if not K:
            Vn = sympy.zeros(n, 0)
        else:
            C = sympy.Matrix.hstack(*K)[: V.cols, :]
            Vn = V * C
            cols = Vn.columnspace()
            Vn = sympy.Matrix.hstack(*cols) if cols else sympy.zeros(n, 0)
        if Vn.rank() == V.rank():
            return V
        V = Vn
    raise RuntimeError("no fixed point")


def lie_derivative_sympy(f_strs, h_str, n):
    xs = sympy.symbols(" ".join(f"x{i + 1}" for i in range(n)), seq=True)
    loc = {str(s): s for s in xs}
    f = [sympy.sympify(s.replace("^", "**"), locals=loc) for s in f_strs]
    h = sympy.sympify(h_str.replace("^", "**"), locals=loc)
    return sympy.expand(sum(sympy.diff(h, x) * fi for x, fi in zip(xs, f))), xs
