"""Observer realizations of polynomial input-affine systems.

The system is ``x' = f(x) + sum_i g_i(x) u_i`` with observers ``y = h(x)``,
all polynomial over the rationals. The main objects are Lie derivatives
and the codistributions they generate. Most codistributions here are
exact, so they are stored through their potentials: a list of functions
whose differentials span them.

Two numeric choices apply throughout:

* The rank of a codistribution is its generic pointwise rank. It is the
  maximum rank over a fixed set of random rational points, computed
  exactly.
* Generated functions are normalized to vanish at the origin, and every
  iteration is capped by ``d_max`` (degree) and ``k_max`` (passes).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact as ex
from .dkstp import Bridge, bridge_matrix
from .errors import BoundExceededError, NoCertificateError, ShapeError
from .poly import Poly, monomials, parse_poly

D_MAX = 8
K_MAX = 20
N_POINTS = 50
SEED = 20240917

VecField = tuple  # tuple of Poly, one per coordinate
CovField = tuple  # tuple of Poly, one per coordinate


def vec_field(components, nvars: int | None = None) -> VecField:
    comps = [c if isinstance(c, Poly) else parse_poly(c, nvars) for c in components]
    n = comps[0].nvars
    if len(comps) != n or any(c.nvars != n for c in comps):
        raise ShapeError(f"vector field needs {n} components over {n} variables")
    return tuple(comps)


def cov_field(components, nvars: int | None = None) -> CovField:
    return vec_field(components, nvars)


# --------------------------------------------------------------------------
# differential calculus


def lie_derivative(f: VecField, h: Poly) -> Poly:
    """``L_f h = sum_i (dh/dx_i) f_i``."""
    if len(f) != h.nvars:
        raise ShapeError(f"field has {len(f)} components, function has {h.nvars} variables")
    out = Poly.zero(h.nvars)
    for i, fi in enumerate(f):
        out = out + h.diff(i) * fi
    return out


def differential(h: Poly) -> CovField:
    return tuple(h.diff(i) for i in range(h.nvars))


def lie_derivative_cov(f: VecField, w: CovField) -> CovField:
    """``(L_f w)_j = sum_i f_i dw_j/dx_i + sum_i w_i df_i/dx_j``."""
    n = len(f)
    if len(w) != n:
        raise ShapeError("covector and vector field dimensions differ")
    out = []
    for j in range(n):
        acc = Poly.zero(n)
        for i in range(n):
            acc = acc + f[i] * w[j].diff(i) + w[i] * f[i].diff(j)
        out.append(acc)
    return tuple(out)


def lie_bracket(f: VecField, g: VecField) -> VecField:
    """``[f, g] = (dg/dx) f - (df/dx) g``."""
    n = len(f)
    out = []
    for k in range(n):
        acc = Poly.zero(n)
        for i in range(n):
            acc = acc + g[k].diff(i) * f[i] - f[k].diff(i) * g[i]
        out.append(acc)
    return tuple(out)


def pair(w: CovField, v: VecField) -> Poly:
    """``<w, v> = sum_i w_i v_i``."""
    acc = Poly.zero(len(v))
    for a, b in zip(w, v):
        acc = acc + a * b
    return acc


# --------------------------------------------------------------------------
# systems


@dataclass(frozen=True, eq=False)
class PolyAffineSystem:
    """``x' = f(x) + sum_i g_i(x) u_i``, ``y_j = h_j(x)`` with ``h_j(0) = 0``."""

    f: VecField
    g: tuple
    h: tuple

    def __post_init__(self):
        f = vec_field(self.f)
        n = len(f)
        g = tuple(vec_field(gi, n) for gi in self.g)
        h = tuple(hj if isinstance(hj, Poly) else parse_poly(hj, n) for hj in self.h)
        if not h:
            raise ShapeError("at least one observer is required")
        for j, hj in enumerate(h):
            if hj.nvars != n:
                raise ShapeError(f"observer {j + 1} has {hj.nvars} variables, expected {n}")
            if hj.constant() != 0:
                raise ValueError(f"observer {j + 1} must vanish at the origin")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h", h)

    @classmethod
    def parse(cls, f, g, h) -> "PolyAffineSystem":
        n = len(f)
        return cls(vec_field(f, n), tuple(vec_field(gi, n) for gi in g),
                   tuple(parse_poly(hj, n) for hj in h))

    @classmethod
    def from_linear(cls, A, B, H) -> "PolyAffineSystem":
        """Encode ``x' = A x + B u``, ``y = H x`` with polynomial components."""
        A, B, H = ex.qmat(A), ex.qmat(np.asarray(B, dtype=object).reshape(len(A), -1)), ex.qmat(H)
        n = A.shape[0]
        f = tuple(Poly.linear(A[i], n) for i in range(n))
        g = tuple(tuple(Poly.const(B[i, k], n) for i in range(n)) for k in range(B.shape[1]))
        h = tuple(Poly.linear(H[j], n) for j in range(H.shape[0]))
        return cls(f, g, h)

    @property
    def n(self) -> int:
        return len(self.f)

    @property
    def m(self) -> int:
        return len(self.g)

    @property
    def p(self) -> int:
        return len(self.h)

    def closed_loop(self, alpha=None) -> VecField:
        """``f + sum_i g_i alpha_i``; ``alpha`` None leaves f unchanged."""
        if alpha is None:
            return self.f
        alpha = [a if isinstance(a, Poly) else parse_poly(a, self.n) for a in alpha]
        if len(alpha) != self.m:
            raise ShapeError(f"feedback needs {self.m} components, got {len(alpha)}")
        out = list(self.f)
        for gi, ai in zip(self.g, alpha):
            out = [fk + gk * ai for fk, gk in zip(out, gi)]
        return tuple(out)

    def rhs(self, x, u=None) -> np.ndarray:
        x = list(np.asarray(x, dtype=float))
        dx = np.array([fk(x) for fk in self.f], dtype=float)
        if u is not None:
            for gi, ui in zip(self.g, np.asarray(u, dtype=float).reshape(-1)):
                dx = dx + ui * np.array([gk(x) for gk in gi], dtype=float)
        return dx

    def output(self, x) -> np.ndarray:
        x = list(np.asarray(x, dtype=float))
        return np.array([hj(x) for hj in self.h], dtype=float)


@dataclass(frozen=True)
class NLSOSystem:
    """``y_j' = drift_j(x) + sum_i input[j][i](x) u_i``."""

    drift: tuple
    input: tuple


def so_system_nl(sys: PolyAffineSystem, alpha=None) -> NLSOSystem:
    f = sys.closed_loop(alpha)
    drift = tuple(lie_derivative(f, hj) for hj in sys.h)
    inp = tuple(tuple(lie_derivative(gi, hj) for gi in sys.g) for hj in sys.h)
    return NLSOSystem(drift, inp)


@dataclass(frozen=True, eq=False)
class ApproxNLOR:
    """Right-hand side ``y' = L_f h(psi(y)) + sum_i L_{g_i} h(psi(y)) u_i``
    with ``psi(y) = Psi[n, p] y``."""

    so: NLSOSystem
    psi: np.ndarray

    def state(self, y) -> np.ndarray:
        return self.psi @ np.asarray(y, dtype=float).reshape(-1)

    def rhs(self, t, y, u=None) -> np.ndarray:
        x = list(self.state(y))
        dy = np.array([d(x) for d in self.so.drift], dtype=float)
        if u is not None:
            u = np.asarray(u, dtype=float).reshape(-1)
            for j, row in enumerate(self.so.input):
                dy[j] += sum(float(gj(x)) * ui for gj, ui in zip(row, u))
        return dy

    def simulate(self, y0, u=None, T: float = 1.0, dt: float = 1e-3):
        from .sim import Trajectory, _grid, rk4

        times = _grid(T, dt)
        uf = (lambda t: None) if u is None else (u if callable(u) else (lambda t: u))
        return Trajectory(times, rk4(lambda t, y: self.rhs(t, y, uf(t)), y0, times))


def or_approx_nl(sys: PolyAffineSystem, bridge: Bridge | None = None) -> ApproxNLOR:
    b = bridge if bridge is not None else Bridge.projecting()
    psi = np.asarray(bridge_matrix(b, sys.n, sys.p), dtype=float)
    return ApproxNLOR(so_system_nl(sys), psi)


# --------------------------------------------------------------------------
# generic rank


def sample_points(nvars: int, count: int = N_POINTS, seed: int = SEED) -> list:
    """Seeded random rational points with small numerators and denominators."""
    rng = random.Random(seed * 1009 + nvars)
    return [[Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(nvars)]
            for _ in range(count)]


def generic_rank(rows: list, nvars: int, points=None) -> int:
    """Max over sample points of the rank of the covector rows."""
    if not rows:
        return 0
    pts = points if points is not None else sample_points(nvars)
    best = 0
    for pt in pts:
        M = np.array([[c(pt) for c in w] for w in rows], dtype=object)
        best = max(best, ex.rank(M))
        if best == min(len(rows), nvars):
            break
    return best


def _center(h: Poly) -> Poly:
    c = h.constant()
    return h - c if c else h


@dataclass(frozen=True, eq=False)
class CoDistribution:
    """Span of covector fields over the functions on R^n.

    ``potentials`` is set when the codistribution is exact: then
    ``generators[k] = d potentials[k]``.
    """

    nvars: int
    generators: tuple
    potentials: tuple | None = None
    history: tuple = field(default=(), compare=False)

    @classmethod
    def exact(cls, funcs, history=()) -> "CoDistribution":
        funcs = tuple(funcs)
        n = funcs[0].nvars
        return cls(n, tuple(differential(h) for h in funcs), funcs, tuple(history))

    @property
    def rank(self) -> int:
        return generic_rank(list(self.generators), self.nvars)

    def contains(self, w: CovField, method: str = "pointwise", d_max: int = D_MAX) -> bool:
        if method == "pointwise":
            base = generic_rank(list(self.generators), self.nvars)
            return generic_rank(list(self.generators) + [tuple(w)], self.nvars) == base
        if method == "module":
            return module_member(list(self.generators), w, d_max) is not None
        raise ValueError(f"unknown membership method {method!r}")

    def same_span(self, rows) -> bool:
        """Generic-span equality with a list of covector fields or constant rows."""
        other = [_as_cov(r, self.nvars) for r in rows]
        a = generic_rank(list(self.generators), self.nvars)
        b = generic_rank(other, self.nvars)
        return a == b == generic_rank(list(self.generators) + other, self.nvars)

    def constant_basis(self) -> np.ndarray | None:
        """Reduced row-echelon basis when every generator is constant."""
        if not all(c.is_constant() for w in self.generators for c in w):
            return None
        if not self.generators:
            return ex.zeros(0, self.nvars)
        M = np.array([[c.constant() for c in w] for w in self.generators], dtype=object)
        return ex.row_basis(M)


def _as_cov(r, n) -> CovField:
    if isinstance(r, tuple) and r and isinstance(r[0], Poly):
        return r
    return tuple(Poly.const(c, n) for c in r)


def module_member(gens: list, w: CovField, d_max: int = D_MAX):
    """Polynomial coefficients ``c_k`` with ``w = sum_k c_k gens[k]``, or None.

    The ``c_k`` range over polynomials of degree at most ``d_max - deg``
    where ``deg`` is the lowest generator degree; the search is exact.
    """
    if not gens:
        return [] if all(c.is_zero() for c in w) else None
    n = len(w)
    gdeg = min(max(c.degree for c in g) for g in gens)
    cdeg = max(d_max - max(gdeg, 0), 0)
    monos = monomials(n, cdeg)
    cols = []
    for g in gens:
        for e in monos:
            m = Poly(n, {e: 1})
            cols.append(tuple(m * c for c in g))
    keys = sorted({e for col in cols + [tuple(w)] for c in col for e in c.terms})
    index = {(j, e): r for r, (j, e) in enumerate((j, e) for j in range(n) for e in keys)}
    M = ex.zeros(len(index), len(cols))
    rhs = ex.zeros(len(index), 1)
    for k, col in enumerate(cols):
        for j, c in enumerate(col):
            for e, v in c.terms.items():
                M[index[(j, e)], k] = v
    for j, c in enumerate(w):
        for e, v in c.terms.items():
            rhs[index[(j, e)], 0] = v
    sol = ex.solve_right(M, rhs)
    if sol is None:
        return None
    out = []
    for k in range(len(gens)):
        chunk = sol[k * len(monos):(k + 1) * len(monos), 0]
        out.append(Poly(n, {e: v for e, v in zip(monos, chunk)}))
    return out


# --------------------------------------------------------------------------
# closures


def closure_fg(sys: PolyAffineSystem, alpha=None, d_max: int = D_MAX,
               k_max: int = K_MAX) -> CoDistribution:
    """Smallest exact codistribution containing ``dh`` and closed under
    ``L_f`` (with ``f`` replaced by ``f + g alpha`` if given) and every ``L_{g_i}``.

    Works on potentials. A new function ``L phi`` joins when it raises the
    generic rank. The first entries are the observers with independent
    differentials.
    """
    f = sys.closed_loop(alpha)
    fields = [f] + list(sys.g)
    n = sys.n
    pts = sample_points(n)
    kept: list[Poly] = []
    rows: list = []
    history = []

    def offer(phi: Poly) -> bool:
        phi = _center(phi)
        if phi.is_zero():
            return False
        w = differential(phi)
        if generic_rank(rows + [w], n, pts) > len(rows):
            if phi.degree > d_max:
                raise BoundExceededError(
                    f"generated function of degree {phi.degree} exceeds d_max = {d_max}",
                    partial=CoDistribution.exact(kept, history) if kept else None)
            kept.append(phi)
            rows.append(w)
            return True
        return False

    frontier = [hj for hj in sys.h if offer(hj)]
    history.append(len(kept))
    for _ in range(k_max):
        if not frontier or len(kept) == n:
            return CoDistribution.exact(kept, history)
        new = []
        for phi in frontier:
            for v in fields:
                cand = lie_derivative(v, phi)
                if offer(cand):
                    new.append(kept[-1])
        frontier = new
        history.append(len(kept))
    if not frontier or len(kept) == n:
        return CoDistribution.exact(kept, history)
    raise BoundExceededError(f"closure not stationary after k_max = {k_max} passes",
                             partial=CoDistribution.exact(kept, history))


def annihilator_of_inputs(sys: PolyAffineSystem) -> CoDistribution:
    """``G^perp``: covector fields vanishing on every ``g_i``."""
    n = sys.n
    if not sys.g:
        return CoDistribution(n, tuple(differential(Poly.var(i, n)) for i in range(n)))
    G = [[sys.g[i][k] for k in range(n)] for i in range(sys.m)]
    basis = _poly_nullspace(G, n)
    return CoDistribution(n, tuple(basis))


def _to_sympy(p: Poly, syms):
    import sympy

    expr = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, a in zip(syms, e):
            if a:
                term = term * s ** a
        expr += term
    return expr


def _from_sympy(expr, syms) -> Poly:
    import sympy

    sp = sympy.Poly(sympy.expand(expr), *syms, domain="QQ")
    return Poly(len(syms), {e: Fraction(int(c.p), int(c.q)) for e, c in sp.terms()})


def _poly_nullspace(rows, n) -> list:
    """Polynomial vectors spanning ``{c : rows c = 0}`` over rational functions."""
    import sympy

    syms = sympy.symbols(" ".join(f"x{i + 1}" for i in range(n)), seq=True)
    M = sympy.Matrix([[_to_sympy(p, syms) for p in r] for r in rows])
    out = []
    for v in M.nullspace(simplify=True):
        v = [sympy.cancel(sympy.together(c)) for c in v]
        den = sympy.Integer(1)
        for c in v:
            den = sympy.lcm(den, sympy.fraction(c)[1])
        v = [sympy.cancel(c * den) for c in v]
        out.append(tuple(_from_sympy(c, syms) for c in v))
    return out


def _intersect_with(omega: list, n: int, sys: PolyAffineSystem) -> list:
    """Covector fields in span(omega) that vanish on every g_i."""
    if not sys.g:
        return list(omega)
    if not omega:
        return []
    M = [[pair(w, gi) for w in omega] for gi in sys.g]
    coeffs = _poly_nullspace(M, n)
    out = []
    for c in coeffs:
        comb = tuple(sum((ck * w[j] for ck, w in zip(c, omega)), Poly.zero(n)) for j in range(n))
        if any(not x.is_zero() for x in comb):
            out.append(comb)
    return out


def invariant_codistribution_iteration(sys: PolyAffineSystem, k_max: int = K_MAX,
                                       d_max: int = D_MAX) -> CoDistribution:
    """``Omega_{k+1} = Omega_k + L_f(Omega_k ∩ G^perp) + sum_i L_{g_i}(Omega_k ∩ G^perp)``
    from ``Omega_0 = span{dh_j}`` until the generic rank is stationary.

    ``history`` records the generic rank of every ``Omega_k``.
    """
    n = sys.n
    pts = sample_points(n)
    omega: list = []
    for hj in sys.h:
        w = differential(hj)
        if generic_rank(omega + [w], n, pts) > len(omega):
            omega.append(w)
    history = [len(omega)]
    for _ in range(k_max):
        inter = _intersect_with(omega, n, sys)
        grew = False
        for w in inter:
            for v in (sys.f,) + sys.g:
                cand = lie_derivative_cov(v, w)
                if all(c.is_zero() for c in cand):
                    continue
                if max(c.degree for c in cand) > d_max:
                    raise BoundExceededError(
                        f"covector of degree above d_max = {d_max}",
                        partial=CoDistribution(n, tuple(omega), history=tuple(history)))
                if generic_rank(omega + [cand], n, pts) > len(omega):
                    omega.append(cand)
                    grew = True
        history.append(len(omega))
        if not grew:
            return CoDistribution(n, tuple(omega), history=tuple(history))
    raise BoundExceededError(f"iteration not stationary after k_max = {k_max} passes",
                             partial=CoDistribution(n, tuple(omega), history=tuple(history)))


# --------------------------------------------------------------------------
# certificates and realizations


def express_in(target: Poly, funcs: list, d_max: int = D_MAX):
    """A polynomial ``P`` in ``len(funcs)`` variables with ``P(funcs) = target``.

    Searches monomials ``z^a`` with ``sum_k a_k deg(funcs[k]) <= d_max``,
    trying the bound ``deg(target)`` first. Returns None when no such ``P``
    exists.
    """
    low = max(target.degree, 1)
    if low < d_max:
        P = _express_bounded(target, funcs, low)
        if P is not None:
            return P
    return _express_bounded(target, funcs, d_max)


def _express_bounded(target: Poly, funcs: list, d_max: int):
    k = len(funcs)
    degs = [max(f.degree, 1) for f in funcs]
    cands = [e for e in monomials(k, d_max) if sum(a * d for a, d in zip(e, degs)) <= d_max]
    images = []
    cache: dict = {}
    for e in cands:
        img = Poly.const(1, target.nvars)
        for j, a in enumerate(e):
            if a:
                key = (j, a)
                if key not in cache:
                    cache[key] = funcs[j] ** a
                img = img * cache[key]
        images.append(img)
    keys = sorted({x for p in images + [target] for x in p.terms})
    row = {x: i for i, x in enumerate(keys)}
    M = ex.zeros(len(keys), len(cands))
    for c, p in enumerate(images):
        for x, v in p.terms.items():
            M[row[x], c] = v
    rhs = ex.zeros(len(keys), 1)
    for x, v in target.terms.items():
        rhs[row[x], 0] = v
    sol = ex.solve_right(M, rhs)
    if sol is None:
        return None
    return Poly(k, {e: v for e, v in zip(cands, sol[:, 0])})


def _split_linear(P: Poly) -> list:
    """Row ``[Xi_1, ..., Xi_k]`` of polynomials with ``P = sum_j Xi_j z_j``.

    Each monomial goes to its first variable. Requires ``P(0) = 0``.
    """
    k = P.nvars
    parts = [dict() for _ in range(k)]
    for e, c in P.terms.items():
        j = next(i for i, a in enumerate(e) if a)
        e2 = list(e)
        e2[j] -= 1
        parts[j][tuple(e2)] = c
    return [Poly(k, t) for t in parts]


@dataclass(frozen=True, eq=False)
class NLCertificate:
    """Observer dynamics closed in ``z = H(x)``.

    ``drift[j]`` and ``input[j][i]`` are polynomials in z with
    ``L_f h_j = drift[j](H)`` and ``L_{g_i} h_j = input[j][i](H)``.
    ``xi0`` factors the drift as ``drift = Xi0(z) z`` when it has no
    constant term.
    """

    funcs: tuple
    drift: tuple
    input: tuple
    xi0: tuple | None
    residual: int = 0

    @property
    def is_linear(self) -> bool:
        return (all(d.degree <= 1 and d.constant() == 0 for d in self.drift)
                and all(q.is_constant() for row in self.input for q in row))

    def linear_matrices(self):
        """``(L, N)`` as Fraction matrices when the dynamics are linear in z."""
        if not self.is_linear:
            return None
        L = np.array([d.linear_part() for d in self.drift], dtype=object)
        k = len(self.funcs)
        m = len(self.input[0]) if self.input else 0
        N = np.array([[q.constant() for q in row] for row in self.input], dtype=object)
        return ex.qmat(L.reshape(k, k)), ex.qmat(N.reshape(k, m)) if m else ex.zeros(k, 0)


def is_invariant_exact_codistribution(sys: PolyAffineSystem, candidate, feedback_alpha=None,
                                      d_max: int = D_MAX) -> NLCertificate | None:
    """Certificate that ``span{dH}`` is invariant under ``f + g alpha`` and every ``g_i``."""
    n = sys.n
    funcs = [c if isinstance(c, Poly) else parse_poly(c, n) for c in candidate]
    for j, c in enumerate(funcs):
        if c.constant() != 0:
            raise ValueError(f"candidate {j + 1} must vanish at the origin")
    f = sys.closed_loop(feedback_alpha)
    drift, inp = [], []
    for hj in funcs:
        P = express_in(lie_derivative(f, hj), funcs, d_max)
        if P is None:
            return None
        row = []
        for gi in sys.g:
            Q = express_in(lie_derivative(gi, hj), funcs, d_max)
            if Q is None:
                return None
            row.append(Q)
        drift.append(P)
        inp.append(tuple(row))
    # Re-verify by substituting H back into every certificate polynomial.
    res = 0
    for hj, P, row in zip(funcs, drift, inp):
        res += len((P.substitute(funcs) - lie_derivative(f, hj)).terms)
        for gi, Q in zip(sys.g, row):
            res += len((Q.substitute(funcs) - lie_derivative(gi, hj)).terms)
    if res:
        raise AssertionError("certificate failed re-verification")
    xi0 = None
    if all(P.constant() == 0 for P in drift):
        xi0 = tuple(tuple(_split_linear(P)) for P in drift)
    return NLCertificate(tuple(funcs), tuple(drift), tuple(inp), xi0, res)


@dataclass(frozen=True, eq=False)
class NLORSystem:
    """Exact OR-system ``z' = drift(z) + input(z) u`` on ``z = funcs(x)``.

    ``L`` and ``N`` are set when the dynamics are linear in z.
    ``selector`` recovers the original observers as ``y = selector z``.
    """

    funcs: tuple
    certificate: NLCertificate
    selector: np.ndarray
    feedback_alpha: tuple | None
    L: np.ndarray | None
    N: np.ndarray | None

    @property
    def dim(self) -> int:
        return len(self.funcs)

    def rhs(self, t, z, u=None) -> np.ndarray:
        z = list(np.asarray(z, dtype=float))
        dz = np.array([d(z) for d in self.certificate.drift], dtype=float)
        if u is not None:
            u = np.asarray(u, dtype=float).reshape(-1)
            for j, row in enumerate(self.certificate.input):
                dz[j] += sum(float(q(z)) * ui for q, ui in zip(row, u))
        return dz

    def initial_state(self, x0) -> np.ndarray:
        x0 = list(np.asarray(x0, dtype=float))
        return np.array([h(x0) for h in self.funcs], dtype=float)


def or_extended_nl(sys: PolyAffineSystem, feedback_alpha=None, d_max: int = D_MAX,
                   k_max: int = K_MAX) -> NLORSystem:
    """Exact OR-system on the closure of the observers under ``f + g alpha`` and ``g``."""
    closure = closure_fg(sys, feedback_alpha, d_max, k_max)
    funcs = list(closure.potentials)
    cert = is_invariant_exact_codistribution(sys, funcs, feedback_alpha, d_max)
    if cert is None:
        raise NoCertificateError("closure potentials admit no polynomial certificate")
    k = len(funcs)
    sel = ex.zeros(sys.p, k)
    for j, hj in enumerate(sys.h):
        # every state function must fit in the search at weight one
        P = express_in(hj, funcs, max([hj.degree] + [f.degree for f in funcs]))
        if P is None or P.degree > 1:
            raise NoCertificateError(f"observer {j + 1} is not linear in the OR state")
        for i, c in enumerate(P.linear_part()):
            sel[j, i] = c
    mats = cert.linear_matrices()
    L, N = mats if mats is not None else (None, None)
    alpha = None
    if feedback_alpha is not None:
        alpha = tuple(a if isinstance(a, Poly) else parse_poly(a, sys.n) for a in feedback_alpha)
    return NLORSystem(tuple(funcs), cert, sel, alpha, L, N)
