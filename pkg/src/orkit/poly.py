"""Sparse multivariate polynomials with rational coefficients.

A ``Poly`` maps exponent tuples to nonzero ``Fraction`` coefficients. The
text form is a sum of terms ``coef*x1^a1*...*xn^an``; parsing goes through
sympy, everything else is plain dictionary arithmetic.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .exact import to_fraction


class Poly:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | None = None):
        if nvars < 1:
            raise ValueError("a polynomial needs at least one variable")
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != nvars or any(v < 0 for v in e):
                raise ValueError(f"bad exponent {e} for {nvars} variables")
            c = to_fraction(c)
            if c != 0:
                clean[e] = clean.get(e, Fraction(0)) + c
                if clean[e] == 0:
                    del clean[e]
        self.nvars = nvars
        self.terms = dict(sorted(clean.items(), key=_order))
        self._hash = None

    # constructors

    @classmethod
    def const(cls, c, nvars: int) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "Poly":
        """The coordinate ``x_{i+1}`` (``i`` is zero-based)."""
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, row, nvars: int | None = None) -> "Poly":
        row = list(row)
        n = nvars or len(row)
        return sum((cls.var(i, n) * c for i, c in enumerate(row)), cls.zero(n))

    @classmethod
    def parse(cls, text: str, nvars: int) -> "Poly":
        return parse_poly(text, nvars)

    # queries

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def coeff(self, e) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def constant(self) -> Fraction:
        return self.coeff((0,) * self.nvars)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def linear_part(self) -> list[Fraction]:
        out = []
        for i in range(self.nvars):
            e = [0] * self.nvars
            e[i] = 1
            out.append(self.coeff(e))
        return out

    # arithmetic

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError(f"variable counts differ: {self.nvars} vs {other.nvars}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(other, self.nvars)

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return Poly(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = to_fraction(other)
            return Poly(self.nvars, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Poly.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def diff(self, i: int) -> "Poly":
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                t[tuple(e2)] = c * e[i]
        return Poly(self.nvars, t)

    def __call__(self, point):
        """Evaluate exactly at Fraction/int points, in floats otherwise."""
        point = list(point)
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {len(point)}")
        exact = all(isinstance(v, (int, Fraction)) for v in point)
        total = Fraction(0) if exact else 0.0
        for e, c in self.terms.items():
            term = c if exact else float(c)
            for v, a in zip(point, e):
                if a:
                    term = term * v ** a
            total += term
        return total

    def substitute(self, polys: list["Poly"]) -> "Poly":
        """``p(q_1(y), ..., q_n(y))`` for polynomials ``q_i`` in a common ring."""
        if len(polys) != self.nvars:
            raise ValueError("need one polynomial per variable")
        k = polys[0].nvars
        out = Poly.zero(k)
        for e, c in self.terms.items():
            term = Poly.const(c, k)
            for q, a in zip(polys, e):
                if a:
                    term = term * q ** a
            out = out + term
        return out

    # comparison and display

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == Poly.const(other, self.nvars)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, tuple(self.terms.items())))
        return self._hash

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, nvars={self.nvars})"


def _order(item):
    e = item[0]
    return (-sum(e), tuple(-v for v in e))


def _coef_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly) -> str:
    """Canonical text: highest degree first, ``coef*x1^a1*...`` per term."""
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.terms.items():
        mono = "*".join(f"x{i + 1}" if a == 1 else f"x{i + 1}^{a}"
                        for i, a in enumerate(e) if a)
        mag = abs(c)
        if not mono:
            body = _coef_text(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_coef_text(mag)}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def parse_poly(text, nvars: int) -> Poly:
    """Parse a polynomial in ``x1..xn``; ``^`` and ``**`` both denote powers."""
    import sympy

    if isinstance(text, (int, Fraction)):
        return Poly.const(text, nvars)
    if not isinstance(text, str):
        raise TypeError(f"polynomial must be a string, got {type(text).__name__}")
    names = {f"x{i + 1}" for i in range(nvars)}
    for name in _NAME.findall(text):
        if name not in names:
            raise ValueError(f"unknown symbol {name!r} in {text!r}")
    syms = sympy.symbols(" ".join(f"x{i + 1}" for i in range(nvars)), seq=True)
    local = {str(s): s for s in syms}
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals=local, rational=True)
        sp = sympy.Poly(sympy.expand(expr), *syms, domain="QQ")
    except (sympy.SympifyError, sympy.PolynomialError, TypeError, SyntaxError) as err:
        raise ValueError(f"cannot parse polynomial {text!r}: {err}") from None
    terms = {e: Fraction(int(c.p), int(c.q)) for e, c in sp.terms()}
    return Poly(nvars, terms)


def monomials(nvars: int, max_degree: int) -> list[tuple]:
    """All exponent tuples of total degree at most ``max_degree``."""
    out: list[tuple] = []

    def rec(prefix, left, i):
        if i == nvars - 1:
            for a in range(left + 1):
                out.append(prefix + (a,))
            return
        for a in range(left + 1):
            rec(prefix + (a,), left - a, i + 1)

    rec((), max_degree, 0)
    return sorted(out, key=lambda e: (sum(e), tuple(-v for v in e)))


def jacobian_at(polys: Iterable[Poly], point) -> np.ndarray:
    """Rows ``d p (point)`` as a Fraction matrix when the point is rational."""
    polys = list(polys)
    if not polys:
        return np.empty((0, 0), dtype=object)
    n = polys[0].nvars
    return np.array([[p.diff(i)(point) for i in range(n)] for p in polys], dtype=object)
