"""Dimension-keeping semi-tensor product (DK-STP) calculus.

A DK-STP is fixed by a family of bridge matrices ``Psi[n, p]`` (n x p) and
multiplies ``A`` (m x n) with ``B`` (p x q) as ``A @ Psi[n, p] @ B``. The
library-wide default bridge is the projecting one, whose ``Psi[n, p]`` is
the cross-dimensional projection from R^p onto R^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import exact as ex
from .errors import (
    ConvergenceError,
    InvalidBridgeError,
    MissingBridgeError,
    NonConvergenceError,
    ShapeError,
)
from .xspace import DimVector, lcm

EPS_SERIES = 1e-14
N_MAX = 200


# --------------------------------------------------------------------------
# weights and bridges


@dataclass(frozen=True, eq=False)
class WeightRule:
    """Generator ``k -> xi_k`` of weight vectors, with ``xi_1 = 1``."""

    name: str
    generator: Callable[[int], np.ndarray] | None = None

    def __call__(self, k: int, exact: bool = False):
        if self.name == "ones":
            return [Fraction(1)] * k if exact else np.ones(k)
        if self.name == "mean":
            return [Fraction(1, k)] * k if exact else np.full(k, 1.0 / k)
        w = np.asarray(self.generator(k))
        if exact:
            return [ex.to_fraction(v) for v in w]
        return w.astype(float)

    def validate(self, kmax: int = 12) -> None:
        for k in range(1, kmax + 1):
            w = np.asarray(self(k), dtype=float).reshape(-1)
            if w.size != k:
                raise InvalidBridgeError(f"weight {self.name}: xi_{k} has length {w.size}")
            if k == 1 and w[0] != 1.0:
                raise InvalidBridgeError(f"weight {self.name}: xi_1 must be 1")
            if np.any(w < 0) or not np.any(w != 0):
                raise InvalidBridgeError(
                    f"weight {self.name}: xi_{k} must be nonzero and nonnegative")


ONES = WeightRule("ones")
MEAN = WeightRule("mean")


def custom_weight(generator: Callable[[int], np.ndarray]) -> WeightRule:
    rule = WeightRule("custom", generator)
    rule.validate()
    return rule


def _weighted(n: int, p: int, xi: WeightRule, eta: WeightRule, exact: bool):
    t = lcm(n, p)
    a, b = t // n, t // p
    wl = xi(a, exact=exact)
    wr = eta(b, exact=exact)
    # Entry (i, j) sums xi[k - i*a] * eta[k - j*b] over the shared positions k.
    if exact:
        out = ex.zeros(n, p)
        for k in range(t):
            i, j = divmod(k, a)[0], divmod(k, b)[0]
            out[i, j] += wl[k - i * a] * wr[k - j * b]
        return out
    left = np.kron(np.eye(n), np.asarray(wl, dtype=float).reshape(1, -1))
    right = np.kron(np.eye(p), np.asarray(wr, dtype=float).reshape(-1, 1))
    return left @ right


@dataclass(frozen=True, eq=False)
class Bridge:
    """A rule producing ``Psi[n, p]`` for any requested shape.

    Build instances with the classmethods: ``default``, ``projecting``,
    ``weighted``, ``pseudo_inverse`` and ``custom``.
    """

    kind: str
    xi: WeightRule | None = None
    eta: WeightRule | None = None
    H: np.ndarray | None = None
    table: dict | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def default(cls) -> "Bridge":
        return cls("default", ONES, ONES)

    @classmethod
    def projecting(cls) -> "Bridge":
        return cls("projecting", MEAN, ONES)

    @classmethod
    def weighted(cls, xi: WeightRule, eta: WeightRule) -> "Bridge":
        xi.validate()
        eta.validate()
        return cls("weighted", xi, eta)

    @classmethod
    def pseudo_inverse(cls, H) -> "Bridge":
        """Bridge whose ``Psi[n, p]`` is ``pinv(H)`` for the p x n matrix ``H``."""
        if ex.is_rational_input(H):
            Hq = ex.qmat(H)
            return cls("pseudo_inverse", H=Hq, _cache={"pinv": ex.pinv(Hq)})
        Hf = np.atleast_2d(np.asarray(H, dtype=float))
        return cls("pseudo_inverse", H=Hf, _cache={"pinv": np.linalg.pinv(Hf)})

    @classmethod
    def custom(cls, table: dict) -> "Bridge":
        """Bridge from an explicit ``{(n, p): matrix}`` table, validated eagerly."""
        checked = {}
        for (n, p), M in table.items():
            exact = ex.is_rational_input(M)
            Mq = ex.qmat(M) if exact else np.atleast_2d(np.asarray(M, dtype=float))
            if Mq.shape != (n, p):
                raise InvalidBridgeError(f"table entry {(n, p)} has shape {Mq.shape}")
            r = ex.rank(Mq) if exact else np.linalg.matrix_rank(Mq)
            if r != min(n, p):
                raise InvalidBridgeError(f"Psi[{n},{p}] has rank {r}, needs {min(n, p)}")
            if n == p and not np.allclose(np.asarray(Mq, dtype=float), np.eye(n), atol=0):
                raise InvalidBridgeError(f"Psi[{n},{n}] must be the identity")
            checked[(int(n), int(p))] = Mq
        return cls("custom", table=checked)

    def matrix(self, n: int, p: int, exact: bool = False) -> np.ndarray:
        if n < 1 or p < 1:
            raise ShapeError(f"bridge shape must be positive, got ({n}, {p})")
        key = (n, p, exact)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        M = self._build(n, p, exact)
        self._cache[key] = M
        return M

    def _build(self, n: int, p: int, exact: bool):
        if self.kind in ("default", "projecting", "weighted"):
            return _weighted(n, p, self.xi, self.eta, exact)
        if self.kind == "pseudo_inverse":
            P = self._cache["pinv"]
            if P.shape == (n, p):
                return P if exact or P.dtype != object else ex.to_float(P)
            if n == p:
                return ex.eye(n) if exact else np.eye(n)
            raise ShapeError(f"pseudo-inverse bridge is {P.shape}, requested ({n}, {p})")
        if self.kind == "custom":
            if (n, p) in self.table:
                M = self.table[(n, p)]
                if exact and M.dtype != object:
                    raise TypeError("custom table holds floats; exact matrix unavailable")
                return M if exact or M.dtype != object else ex.to_float(M)
            if n == p:
                return ex.eye(n) if exact else np.eye(n)
            raise MissingBridgeError(f"custom bridge table has no entry for ({n}, {p})")
        raise ValueError(f"unknown bridge kind {self.kind!r}")

    def can_be_exact(self) -> bool:
        if self.kind in ("default", "projecting"):
            return True
        if self.kind == "weighted":
            return self.xi.name != "custom" and self.eta.name != "custom"
        if self.kind == "pseudo_inverse":
            return self._cache["pinv"].dtype == object
        return all(M.dtype == object for M in self.table.values())


PROJECTING = Bridge.projecting()


def _bridge(b: Bridge | None) -> Bridge:
    return PROJECTING if b is None else b


def bridge_matrix(b: Bridge | None, n: int, p: int, exact: bool = False) -> np.ndarray:
    return _bridge(b).matrix(n, p, exact=exact)


def _mat(A):
    a = np.asarray(A)
    if a.dtype == object:
        return a
    return np.atleast_2d(np.asarray(A, dtype=float))


def _exact_pair(A, b: Bridge) -> bool:
    return isinstance(A, np.ndarray) and A.dtype == object and b.can_be_exact()


# --------------------------------------------------------------------------
# products and actions


def dk_mul(A, B, b: Bridge | None = None) -> np.ndarray:
    """``A (x)_Psi B = A @ Psi[n, p] @ B`` for A m x n and B p x q."""
    b = _bridge(b)
    A, B = _mat(A), _mat(B)
    exact = A.dtype == object and B.dtype == object and b.can_be_exact()
    Psi = b.matrix(A.shape[1], B.shape[0], exact=exact)
    if not exact:
        A, B = np.asarray(A, dtype=float), np.asarray(B, dtype=float)
    return A @ Psi @ B


def pi_A(A, b: Bridge | None = None) -> np.ndarray:
    """The m x m matrix of the action of A (m x n) restricted to R^m."""
    b = _bridge(b)
    A = _mat(A)
    exact = _exact_pair(A, b)
    Psi = b.matrix(A.shape[1], A.shape[0], exact=exact)
    return (A if exact else np.asarray(A, dtype=float)) @ Psi


def dk_action(A, x, b: Bridge | None = None) -> DimVector:
    """``A (x) x = A @ Psi[n, dim x] @ x``; the result lives in R^m."""
    b = _bridge(b)
    A = np.asarray(_mat(A), dtype=float)
    x = DimVector.of(x)
    return DimVector(A @ b.matrix(A.shape[1], x.dim) @ x.entries)


def lie_bracket_dk(A, B, b: Bridge | None = None) -> np.ndarray:
    A, B = _mat(A), _mat(B)
    if A.shape != B.shape:
        raise ShapeError(f"bracket needs equal shapes, got {A.shape} and {B.shape}")
    return dk_mul(A, B, b) - dk_mul(B, A, b)


# --------------------------------------------------------------------------
# extended ring  r * I_{m x n} + A


@dataclass(frozen=True, eq=False)
class ExtElem:
    """Element ``r I_{m x n} + A`` of the ring with the artificial identity."""

    r: float
    A: np.ndarray

    @classmethod
    def identity(cls, m: int, n: int) -> "ExtElem":
        return cls(1.0, np.zeros((m, n)))

    @classmethod
    def matrix(cls, A) -> "ExtElem":
        return cls(0.0, _mat(A))

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def __add__(self, other: "ExtElem") -> "ExtElem":
        return ext_add(self, other)

    def scale(self, s) -> "ExtElem":
        return ExtElem(self.r * s, self.A * s)

    def is_close(self, other: "ExtElem", tol: float = 1e-12) -> bool:
        return (self.shape == other.shape and abs(float(self.r) - float(other.r)) <= tol
                and np.allclose(np.asarray(self.A, dtype=float),
                                np.asarray(other.A, dtype=float), atol=tol, rtol=0))

    def __repr__(self):
        return f"ExtElem(r={self.r}, A={np.asarray(self.A).tolist()})"


def _check_same(a: ExtElem, b: ExtElem):
    if a.shape != b.shape:
        raise ShapeError(f"extended-ring operands differ in shape: {a.shape} vs {b.shape}")


def ext_add(a: ExtElem, b: ExtElem) -> ExtElem:
    _check_same(a, b)
    return ExtElem(a.r + b.r, a.A + b.A)


def ext_mul(a: ExtElem, b: ExtElem, br: Bridge | None = None) -> ExtElem:
    """``(r1 I + A)(r2 I + B) = r1 r2 I + (r1 B + r2 A + A (x) B)``."""
    _check_same(a, b)
    return ExtElem(a.r * b.r, a.r * b.A + b.r * a.A + dk_mul(a.A, b.A, br))


def ext_action(e: ExtElem, x, b: Bridge | None = None) -> DimVector:
    """``(r I_{m x n} + A) (x) x = r Psi[m, dim x] x + A (x) x``."""
    b = _bridge(b)
    x = DimVector.of(x)
    m = e.shape[0]
    ident = b.matrix(m, x.dim) @ x.entries
    return DimVector(float(e.r) * ident + dk_action(e.A, x, b).entries)


def dk_power(A, k: int, b: Bridge | None = None) -> ExtElem:
    """``A^<k>``: the identity element for k = 0, else ``A (Psi A)^(k-1)``."""
    if k < 0:
        raise ValueError("dk_power needs k >= 0")
    A = _mat(A)
    if k == 0:
        return ExtElem.identity(*A.shape)
    P = pi_A(A, b)
    out = A if P.dtype == object else np.asarray(A, dtype=float)
    for _ in range(k - 1):
        out = P @ out
    return ExtElem(0.0, out)


# --------------------------------------------------------------------------
# analytic functions


def _coefficients(f, alpha=None):
    """Return ``(identity_coefficient, c_k for k >= 1 as a function)``."""
    if f == "exp":
        return 1.0, lambda k: 1.0 / math.factorial(k)
    if f == "sin":
        return 0.0, lambda k: 0.0 if k % 2 == 0 else (-1.0) ** ((k - 1) // 2) / math.factorial(k)
    if f == "cos":
        return 1.0, lambda k: 0.0 if k % 2 else (-1.0) ** (k // 2) / math.factorial(k)
    if f == "sinh":
        return 0.0, lambda k: 0.0 if k % 2 == 0 else 1.0 / math.factorial(k)
    if f == "cosh":
        return 1.0, lambda k: 0.0 if k % 2 else 1.0 / math.factorial(k)
    if f == "ln1p":
        return 0.0, lambda k: (-1.0) ** (k + 1) / k
    if f == "pow":
        if alpha is None:
            raise ValueError("pow needs an exponent alpha")

        def binom(k):
            c = 1.0
            for j in range(k):
                c *= (alpha - j) / (j + 1)
            return c

        return 1.0, binom
    raise ValueError(f"unknown analytic function {f!r}")


def dk_norm(A, b: Bridge | None = None) -> float:
    """``sqrt(lambda_max(Psi^T A^T A Psi))`` with ``Psi = Psi[n, m]``."""
    P = np.asarray(pi_A(A, b), dtype=float)
    if not P.size:
        return 0.0
    return float(np.sqrt(max(np.linalg.eigvalsh(P.T @ P).max(), 0.0)))


def dk_analytic(f, A, b: Bridge | None = None, alpha: float | None = None,
                eps: float = EPS_SERIES, n_max: int = N_MAX) -> ExtElem:
    """Truncated Taylor series of ``f`` at a (possibly non-square) matrix.

    ``f`` is one of exp, sin, cos, sinh, cosh, ln1p (``ln(I + A)``) or pow
    (``(I + A)^alpha``). Summation stops once a nonzero term falls below
    ``eps`` times the accumulated norm.
    """
    if isinstance(f, tuple):
        f, alpha = f
    A = np.asarray(_mat(A), dtype=float)
    r0, coef = _coefficients(f, alpha)
    polynomial = f == "pow" and float(alpha).is_integer() and alpha >= 0
    if f in ("ln1p", "pow") and not polynomial:
        nrm = dk_norm(A, b)
        if nrm >= 1.0:
            raise ConvergenceError(f"{f} series needs DK-norm < 1, got {nrm:.6g}")
    P = pi_A(A, b)
    power = A.copy()
    acc = np.zeros_like(A)
    for k in range(1, n_max + 1):
        c = coef(k)
        if c != 0.0:
            term = c * power
            acc = acc + term
            tnorm = np.linalg.norm(term)
            if tnorm <= eps * (abs(r0) + np.linalg.norm(acc)):
                return ExtElem(r0, acc)
        elif polynomial:
            return ExtElem(r0, acc)
        if not np.any(power):
            return ExtElem(r0, acc)
        power = P @ power
    raise NonConvergenceError(f"{f} series did not converge in {n_max} terms")


def phi1(Z, eps: float = EPS_SERIES, n_max: int = N_MAX) -> np.ndarray:
    """``sum_k Z^k / (k+1)!`` by its Taylor series."""
    Z = np.asarray(Z, dtype=float)
    n = Z.shape[0]
    acc = np.eye(n)
    term = np.eye(n)
    for k in range(1, n_max + 1):
        term = term @ Z / (k + 1)
        acc = acc + term
        if np.linalg.norm(term) <= eps * np.linalg.norm(acc):
            return acc
    raise NonConvergenceError(f"phi1 series did not converge in {n_max} terms")


# --------------------------------------------------------------------------
# generalized Cayley-Hamilton


def char_coefficients(M) -> list:
    """``[c0, ..., c_{m-1}]`` of ``det(tI - M)``; exact for rational input."""
    M = np.asarray(M)
    if M.dtype == object:
        return ex.charpoly(M)
    poly = np.real_if_close(np.poly(np.asarray(M, dtype=float)))
    return [float(v) for v in poly[::-1][:-1]]


def cayley_hamilton_residual(A, b: Bridge | None = None, transposed: bool = False) -> float:
    """Frobenius norm of ``A^<m+1> + c_{m-1} A^<m> + ... + c_0 A``.

    ``c`` are the characteristic coefficients of ``Pi_A = A Psi[n, m]``.
    With ``transposed=True`` the n x n matrix ``Psi[n, m] A`` supplies the
    coefficients instead, so the identity has degree n + 1.
    """
    b = _bridge(b)
    A = _mat(A)
    exact = _exact_pair(A, b)
    if not exact:
        A = np.asarray(A, dtype=float)
    m, n = A.shape
    if transposed:
        Q = b.matrix(n, m, exact=exact) @ A
        coeffs = char_coefficients(Q)
        # A^<k> = A Q^(k-1)
        acc = A @ _poly_at(Q, coeffs)
    else:
        P = A @ b.matrix(n, m, exact=exact)
        coeffs = char_coefficients(P)
        acc = _poly_at(P, coeffs) @ A
    return ex.frobenius(acc)


def _poly_at(M, coeffs):
    """Evaluate ``M^d + c_{d-1} M^{d-1} + ... + c_0 I`` by Horner's rule."""
    d = M.shape[0]
    I = ex.eye(d) if M.dtype == object else np.eye(d)
    acc = I
    for c in reversed(coeffs):
        acc = acc @ M + c * I
    return acc
