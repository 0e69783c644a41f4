"""Re-derive the bundled reference examples and compare with their printed values.

Each check ends in one of three states:

PASS     the computed value equals the printed one exactly
ERRATUM  the printed value differs, yet the computed one satisfies the
         defining identity (both values are reported)
FAIL     the computed value is wrong or violates its defining identity
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import exact as ex
from . import io
from . import nonlin as nl
from . import orsys
from . import subspace as ss
from .poly import Poly
from .xspace import projection_matrix


@dataclass(frozen=True)
class Check:
    example: str
    label: str
    status: str
    computed: object = None
    printed: object = None
    note: str = ""

    def line(self, show_values: bool = True) -> str:
        text = f"{self.status:<8} {self.example:<20} {self.label}"
        if self.note:
            text += f"  ({self.note})"
        if show_values and self.status != "PASS" and self.printed is not None:
            pad = " " * 9
            text += f"\n{pad}printed:  {_show(self.printed)}\n{pad}computed: {_show(self.computed)}"
        return text


def _show(v) -> str:
    if isinstance(v, np.ndarray):
        return str(ex.to_jsonable(v))
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_show(x) for x in v) + "]"
    return str(v)


def _mat(v, column=False):
    return io.parse_matrix(v, column=column)


def _eq(a, b) -> bool:
    a, b = np.asarray(a, dtype=object), np.asarray(b, dtype=object)
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


class _Log:
    def __init__(self, example):
        self.example = example
        self.checks: list[Check] = []

    def value(self, label, computed, printed, identity_ok=None, note=""):
        """Exact comparison; a mismatch is an erratum only if the identity holds."""
        if _eq(computed, printed):
            status = "PASS"
        elif identity_ok:
            status = "ERRATUM"
        else:
            status = "FAIL"
        self.checks.append(Check(self.example, label, status, computed, printed, note))

    def truth(self, label, ok, note=""):
        self.checks.append(Check(self.example, label, "PASS" if ok else "FAIL", note=note))


def example_names() -> list[str]:
    files = resources.files("orkit").joinpath("examples")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def load_example(name: str) -> io.Loaded:
    path = resources.files("orkit").joinpath("examples").joinpath(f"{name}.json")
    return io.load(path)


# --------------------------------------------------------------------------
# per-example checks


def _so_projection(ld, log):
    so, pr = ld.record, ld.get("printed")
    p, n = so.M.shape
    Pi52 = projection_matrix(p, n, exact=True)
    y0 = ld.vector("y0")
    # Orthogonality of the projection residual is the defining property.
    P_ok = _ortho(Pi52, p, n)
    log.value("projection R^2 -> R^5", Pi52, _mat(pr["Pi_5_2"]), P_ok,
              "printed matrix is 0.4 x the orthogonal projection")
    o = orsys.or_projection(so)
    L_print = _mat(pr["L"])
    log.value("L = M Psi", o.L, L_print, _eq(o.L, so.M @ Pi52),
              "computed L is 2.5 x printed L")
    log.truth("L equals 2.5 x printed L", _eq(o.L, L_print * ex.to_fraction(5) / 2))
    Pi26 = projection_matrix(y0.size, p, exact=True)
    log.value("projection R^6 -> R^2", Pi26, _mat(pr["Pi_2_6"]), _ortho(Pi26, y0.size, p),
              "printed matrix omits the factor 1/3")
    y0p = Pi26 @ y0
    up = np.repeat(y0p, y0.size // p)
    log.value("y(0+)", y0p, _mat(pr["y0_plus"])[0], up @ (y0 - up) == 0,
              "printed value matches neither formula")
    log.value("N", o.N, _mat(pr["N"], column=True))


def _ortho(P, m, n) -> bool:
    """Columnwise: the projection residual of each unit vector is V-orthogonal to R^n."""
    t = np.lcm(m, n)
    for j in range(m):
        xi = ex.zeros(m, 1)
        xi[j, 0] = ex.to_fraction(1)
        x = P @ xi
        r = np.repeat(xi[:, 0], t // m) - np.repeat(x[:, 0], t // n)
        for k in range(n):
            e = np.repeat(np.eye(n, dtype=int)[k], t // n)
            if sum(a * b for a, b in zip(r, e)) != 0:
                return False
    return True


def _penrose(H, X) -> bool:
    return (_eq(H @ X @ H, H) and _eq(X @ H @ X, X)
            and _eq((H @ X).T, H @ X) and _eq((X @ H).T, X @ H))


def _singular_deficient(ld, log):
    sys, pr = ld.record, ld.get("printed")
    Th = sys.theta
    Tp = orsys.pseudo_inverse(Th)
    printed = _mat(pr["Theta_pinv"])
    log.truth("computed inverse satisfies the Penrose identities", _penrose(Th, Tp))
    log.value("Theta+", Tp, printed, _penrose(Th, Tp),
              "entry (3,2) printed as -0.125 breaks the Penrose identities; they need -0.175")
    o = orsys.or_singular(sys)
    psi = dict(o.notes)["psi"]
    log.value("Psi_+", psi, _mat(pr["Psi_plus"]), _eq(psi, Tp[:, :sys.r]),
              "first r columns of Theta+")
    log.truth("approximate (Theta singular)", o.exactness == "approximate")


def _singular_invertible(ld, log):
    sys, pr = ld.record, ld.get("printed")
    o = orsys.or_singular(sys)
    psi = dict(o.notes)["psi"]
    target = np.vstack([ex.eye(sys.r), ex.zeros(sys.n - sys.r, sys.r)])
    log.value("Psi", psi, _mat(pr["Psi"]), _eq(sys.theta @ psi, target))
    log.truth("Theta Psi = [I; 0] with printed Psi", _eq(sys.theta @ _mat(pr["Psi"]), target))
    log.truth("exact (Theta invertible)", o.exactness == "exact" and pr["exact"])


def _exact_invariant(ld, log):
    sys, pr = ld.record, ld.get("printed")
    cert = ss.is_A_invariant(sys.H, sys.A)
    log.truth("observer space is A-invariant", cert is not None)
    o = orsys.or_exact(sys)
    log.value("Xi", o.L, _mat(pr["Xi"]), _eq(o.L @ sys.H, sys.H @ sys.A))
    log.value("CB", o.N, _mat(pr["CB"], column=True), _eq(o.N, sys.H @ sys.B))
    log.truth("CA = Xi C (zero residual)", _eq(sys.H @ sys.A, _mat(pr["Xi"]) @ sys.H))
    log.value("pseudo-inverse OR coincides", orsys.or_pseudoinverse(sys).L, _mat(pr["Xi"]))


def _extended_closure(ld, log):
    sys, pr = ld.record, ld.get("printed")
    log.truth("observer space is not A-invariant", orsys.or_exact(sys) is None)
    o = orsys.or_extended(sys)
    W, At, Bt = o.observer_map, o.L, o.N
    log.value("closure basis H", W, _mat(pr["H"]),
              ss.DualSubspace.of(_mat(pr["H"])) == ss.a_invariant_closure(sys.H, sys.A))
    log.value("A_tilde", At, _mat(pr["A_tilde"]), _eq(W @ sys.A, At @ W))
    log.value("B_tilde", Bt, _mat(pr["B_tilde"], column=True), _eq(W @ sys.B, Bt))
    Hp = _mat(pr["H"])
    log.truth("H A = A_tilde H and H B = B_tilde with printed values",
              _eq(Hp @ sys.A, _mat(pr["A_tilde"]) @ Hp) and _eq(Hp @ sys.B, _mat(pr["B_tilde"], column=True)))
    log.truth("y = z1", _eq(o.selector, [[1, 0, 0, 0, 0]]))


def _feedback_closure(ld, log):
    sys, pr = ld.record, ld.get("printed")
    A, B = sys.A, sys.B
    V = ss.largest_ab_invariant_in(A, B, ss.perp(ss.row_space(sys.H)))
    Vp = ss.Subspace.of(_mat(pr["V"]))
    log.value("V (as a subspace)", V.basis, Vp.basis)
    F = _mat(pr["F"])
    log.truth("(A + B F) V ⊆ V with printed F", V.contains((A + B @ F) @ V.basis))
    Wp = _mat(pr["V_perp"])
    closure, _ = ss.ab_invariant_closure(sys.H, A, B)
    log.value("V_perp (as a dual subspace)", closure.basis, ss.DualSubspace.of(Wp).basis)
    o = orsys.or_feedback(sys, feedback=ld.matrix("feedback"), basis=ld.matrix("basis"))
    log.value("V_perp (A + B F)", Wp @ (A + B @ F), _mat(pr["V_perp_A_closed"]))
    ident = _eq(o.L @ Wp, Wp @ (A + B @ F))
    log.value("Xi", o.L, _mat(pr["Xi"]), ident, "row 1 differs; derived from L V_perp = V_perp (A + B F)")
    log.value("N = V_perp B", o.N, _mat(pr["N"], column=True), _eq(o.N, Wp @ B),
              "derived from N = V_perp B")
    log.truth("feedback OR certificate has zero residual",
              all(v == 0 for v in o.verify(sys).values()))
    k = orsys.kalman_minimal(sys)
    mk = orsys.markov_parameters
    same_io = all(_eq(a, b) for a, b in zip(mk(sys, 2 * sys.n), mk(k, 2 * sys.n)))
    log.value("minimal realization A11", k.A, _mat(pr["kalman_A"]), same_io)
    log.value("minimal realization B1", k.B, _mat(pr["kalman_B"], column=True), same_io)
    log.value("minimal realization C1", k.H, _mat(pr["kalman_C"]), same_io)
    dd = orsys.ddp_check(sys)
    log.truth("disturbance e4 is decoupled", bool(dd))


def _poly_feedback(ld, log):
    sys, pr = ld.record, ld.get("printed")
    n = sys.n
    h = sys.h[0]
    alpha = ld.get("alpha")
    so = nl.so_system_nl(sys)
    log.value("L_f h", str(so.drift[0]), pr["Lf_h"])
    log.value("L_g h", str(so.input[0][0]), pr["Lg_h"])
    log.truth("h alone is not invariant", nl.is_invariant_exact_codistribution(sys, [h]) is None)
    gp = nl.annihilator_of_inputs(sys)
    log.truth("G_perp", gp.same_span(pr["G_perp"]))
    om = nl.invariant_codistribution_iteration(sys)
    log.truth("Omega_0", nl.CoDistribution.exact([h]).same_span(pr["Omega_0"]))
    log.truth("Omega_k (k >= 1)", om.same_span(pr["Omega_k"]) and om.history[1:] == (2,) * (len(om.history) - 1))
    ft = sys.closed_loop(alpha)
    ft_print = tuple(Poly.parse(s, n) for s in pr["f_tilde"])
    ok = nl.lie_derivative(ft, h) == Poly.parse(pr["Lf_h"], n)
    log.value("closed-loop drift", [str(p) for p in ft], [str(p) for p in ft_print], ok,
              "third component printed as x2 + x2^2; feedback only enters the second")
    cl = nl.closure_fg(sys, alpha)
    log.value("closure potentials", [str(p) for p in cl.potentials],
              [str(Poly.parse(s, n)) for s in pr["Delta_m"]])
    o = nl.or_extended_nl(sys, alpha)
    log.value("OR dynamics L", o.L, _mat(pr["L"]))
    log.value("OR input N", o.N, _mat(pr["N"], column=True))


def _controlled_invariant(ld, log):
    sys, pr = ld.record, ld.get("printed")
    A, B = sys.A, sys.B
    X = ss.perp(ss.row_space(sys.H))
    trace: list = []
    V = ss.largest_ab_invariant_in(A, B, X, trace)

    def sub(key):
        return ss.Subspace.of(_mat(pr[key]))

    def dual(key):
        return ss.DualSubspace.of(_mat(pr[key]).T)

    log.value("V0 = ker C", X.basis, sub("V0").basis)
    s0, s1 = trace[0], trace[1]
    log.truth("S0 = B + V0 = V0", s0.S == X)
    log.value("S0_perp", s0.S_perp.basis, dual("S0_perp").basis)
    log.value("A^T S0_perp", s0.At_S_perp.basis, dual("At_S0_perp").basis)
    log.value("A^-1(S0)", s0.preimage.basis, sub("preimage_S0").basis)
    log.value("V1", s0.V.basis, sub("V1").basis)
    log.value("S1_perp", s1.S_perp.basis, dual("S1_perp").basis)
    log.value("A^T S1_perp", s1.At_S_perp.basis, dual("At_S1_perp").basis)
    log.value("A^-1(S1)", s1.preimage.basis, sub("preimage_S1").basis)
    log.value("V2", s1.V.basis, sub("V2").basis)
    log.truth("V3 = V2 (stationary)", len(trace) == 3 and trace[2].V == s1.V and V == s1.V)


RUNNERS = {
    "so_projection": _so_projection,
    "singular_deficient": _singular_deficient,
    "singular_invertible": _singular_invertible,
    "exact_invariant": _exact_invariant,
    "extended_closure": _extended_closure,
    "feedback_closure": _feedback_closure,
    "poly_feedback": _poly_feedback,
    "controlled_invariant": _controlled_invariant,
}


def run(filter: str | None = None) -> list[Check]:
    """Run every bundled example whose name contains ``filter``.

    An empty-string filter selects nothing.
    """
    out: list[Check] = []
    for name in example_names():
        if filter is not None and (filter == "" or filter not in name):
            continue
        runner = RUNNERS.get(name)
        if runner is None:
            continue
        log = _Log(name)
        try:
            runner(load_example(name), log)
        except Exception as err:  # a crashing example is a failure, not a crash
            log.checks.append(Check(name, "runner", "FAIL", note=f"{type(err).__name__}: {err}"))
        out.extend(log.checks)
    return out


def summarize(checks: list[Check]) -> dict:
    counts = {"PASS": 0, "ERRATUM": 0, "FAIL": 0}
    for c in checks:
        counts[c.status] += 1
    return counts
