"""``orkit`` command line.

Exit codes: 0 success, 1 usage or input error, 2 a normal mathematical
absence (no exact realization, property does not hold), 3 a verification
failure (``repro`` FAIL lines, or printed-value mismatches under
``--strict-paper``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import dkstp, io, nonlin, orsys, repro, sim
from . import subspace as ss
from .errors import (BoundExceededError, NoCertificateError, OrkitError, SchemaError,
                     ShapeError)

EXIT_OK, EXIT_USAGE, EXIT_ABSENT, EXIT_VERIFY = 0, 1, 2, 3
EPS_NUM = 1e-9
NOT_INVARIANT = "ℋ* is not A-invariant; try `build extended`"


class UsageError(Exception):
    pass


def eps_num() -> float:
    raw = os.environ.get("ORKIT_TOL")
    if raw is None:
        return EPS_NUM
    try:
        val = float(raw)
    except ValueError:
        raise UsageError(f"ORKIT_TOL must be a number, got {raw!r}") from None
    if not val > 0:
        raise UsageError("ORKIT_TOL must be positive")
    return val


def _bridge(name: str, loaded=None) -> dkstp.Bridge:
    if name == "projecting":
        return dkstp.Bridge.projecting()
    if name == "default":
        return dkstp.Bridge.default()
    if name == "pseudoinverse":
        if loaded is None or loaded.kind != "linear":
            raise UsageError("--bridge pseudoinverse needs a linear system file (it uses H)")
        return dkstp.Bridge.pseudo_inverse(loaded.record.H)
    raise UsageError(f"unknown bridge {name!r}")


def _fmt(M) -> str:
    if M is None:
        return "none"
    return json.dumps(io.matrix_json(M))


def _need(loaded, *kinds):
    if loaded.kind not in kinds:
        raise UsageError(f"this command needs a {' or '.join(kinds)} file, got {loaded.kind}")


# --------------------------------------------------------------------------
# build


def _printed_mismatches(loaded) -> list[str]:
    """Non-PASS reference checks when the file is one of the bundled examples."""
    name = loaded.get("name")
    if name not in repro.RUNNERS:
        return []
    return [c.line().replace("\n", "\n  ") for c in repro.run(name)
            if c.example == name and c.status != "PASS"]


def cmd_build(args) -> int:
    loaded = io.load(args.input)
    kind = args.kind
    report = [f"construction: {kind}"]
    if loaded.kind == "poly_affine":
        if kind not in ("extended", "feedback"):
            raise UsageError(f"`build {kind}` is not defined for polynomial systems")
        alpha = loaded.get("alpha") if kind == "feedback" else None
        if kind == "feedback" and alpha is None:
            raise UsageError("`build feedback` on a polynomial system needs an 'alpha' entry")
        try:
            o = nonlin.or_extended_nl(loaded.record, alpha)
        except (NoCertificateError, BoundExceededError) as err:
            print(f"no exact polynomial OR-system: {err}", file=sys.stderr)
            return EXIT_ABSENT
        doc = io.nl_or_to_dict(o)
        report += [f"dimension: {o.dim}", "exactness: exact",
                   "state functions: " + ", ".join(str(p) for p in o.funcs)]
        if o.L is not None:
            report += [f"L: {_fmt(o.L)}", f"N: {_fmt(o.N)}"]
        result = o
    else:
        result = _build_linear(kind, loaded, args)
        if result is None:
            print(NOT_INVARIANT, file=sys.stderr)
            return EXIT_ABSENT
        doc = io.or_to_dict(result)
        report += [f"kind: {result.kind}", f"dimension: {result.dim}",
                   f"exactness: {result.exactness}", f"residual: {result.residual:g}",
                   f"L: {_fmt(result.L)}", f"N: {_fmt(result.N)}"]
        if result.observer_map is not None:
            report.append(f"observer map: {_fmt(result.observer_map)}")
        if result.feedback_F is not None:
            report.append(f"feedback F: {_fmt(result.feedback_F)}")
    mism = _printed_mismatches(loaded)
    if args.show_errata or args.strict_paper:
        report += mism or ["reference values: all match"]
    if args.output:
        io.dump(doc, args.output)
        report.append(f"written: {args.output}")
    else:
        report.append(io.dump(doc).rstrip())
    print("\n".join(report))
    if args.strict_paper and mism:
        return EXIT_VERIFY
    return EXIT_OK


def _build_linear(kind, loaded, args):
    rec = loaded.record
    if kind == "singular":
        _need(loaded, "singular")
        return orsys.or_singular(rec)
    if kind == "projection":
        _need(loaded, "linear", "so")
        so = rec if loaded.kind == "so" else orsys.so_system(rec)
        time = "continuous" if loaded.kind == "so" else rec.time
        return orsys.or_projection(so, _bridge(args.bridge, loaded), time)
    _need(loaded, "linear")
    if kind == "pseudoinverse":
        return orsys.or_pseudoinverse(rec, eps_num())
    if kind == "exact":
        return orsys.or_exact(rec)
    if kind == "extended":
        return orsys.or_extended(rec)
    if kind == "feedback":
        return orsys.or_feedback(rec, feedback=loaded.matrix("feedback"),
                                 basis=loaded.matrix("basis"))
    raise UsageError(f"unknown construction {kind!r}")


# --------------------------------------------------------------------------
# sim and compare


def _input_signal(spec: str, m: int):
    """Input signal ``t -> R^m`` from its command-line form."""
    if spec == "zero":
        return None
    if spec == "step":
        return np.ones(m)
    if spec == "sine":
        return lambda t: np.sin(t) * np.ones(m)
    if spec.startswith("csv:"):
        return _u_csv(Path(spec[4:]), m)
    raise UsageError(f"unknown input spec {spec!r} (zero|step|sine|csv:PATH)")


def _u_csv(path: Path, m: int):
    """Zero-order hold through rows ``t,u1..um`` (a header row is optional).

    RK4 samples the input at its stage times, so a jump inside or at the end
    of a step is integrated to first order in ``dt`` only.
    """
    try:
        lines = [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]
    except OSError as err:
        raise UsageError(f"cannot read input CSV: {err}") from None
    rows = []
    for k, ln in enumerate(lines, 1):
        cells = ln.split(",")
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            if k == 1:
                continue
            raise UsageError(f"{path}: line {k}: non-numeric entry") from None
        if len(vals) != m + 1:
            raise UsageError(f"{path}: line {k}: expected {m + 1} columns, got {len(vals)}")
        rows.append(vals)
    if not rows:
        raise UsageError(f"{path}: no input rows")
    data = np.array(rows)
    if np.any(np.diff(data[:, 0]) <= 0):
        raise UsageError(f"{path}: times must increase")
    ts, us = data[:, 0], data[:, 1:]

    def u(t):
        k = max(int(np.searchsorted(ts, t + 1e-12, side="right")) - 1, 0)
        return us[k]

    return u


def _steps(args) -> int:
    if args.steps is not None:
        return args.steps
    return int(round(args.T))


def cmd_sim(args) -> int:
    if args.T <= 0 or args.dt <= 0:
        raise UsageError("--T and --dt must be positive")
    loaded = io.load(args.input)
    rec = loaded.record
    time = loaded.get("time", "continuous")
    if loaded.kind == "linear":
        x0 = loaded.vector("x0")
        x0 = np.zeros(rec.n) if x0 is None else np.asarray(x0, float)
        u = _input_signal(args.u, rec.m)
        if time == "discrete":
            tr = sim.sim_linear_discrete(rec.A, rec.B, x0, u, _steps(args))
        else:
            tr = sim.sim_continuous_controlled(rec.A, rec.B, x0, u, args.T, args.dt)
    elif loaded.kind in ("dk", "so"):
        if loaded.kind == "so":
            A, Bm = np.asarray(rec.M, float), np.asarray(rec.N, float)
        else:
            A, Bm = np.asarray(rec, float), loaded.matrix("B", column=True)
        y0 = loaded.vector("y0")
        y0 = np.zeros(A.shape[0]) if y0 is None else np.asarray(y0, float)
        b = _bridge(args.bridge)
        u = None if Bm is None else _input_signal(args.u, Bm.shape[1])
        if time == "discrete":
            tr = sim.sim_discrete_controlled(A, Bm, y0, u, _steps(args), b)
        elif Bm is None or u is None:
            tr = sim.sim_continuous(A, y0, args.T, args.dt, b)
        else:
            tr = sim.sim_dk_controlled(A, Bm, y0, u, args.T, args.dt, b)
    elif loaded.kind == "poly_affine":
        x0 = loaded.vector("x0")
        x0 = np.zeros(rec.n) if x0 is None else np.asarray(x0, float)
        u = _input_signal(args.u, rec.m)
        uf = sim._input(u, rec.m) if rec.m else (lambda t: None)
        times = sim._grid(args.T, args.dt)
        tr = sim.Trajectory(times, sim.rk4(lambda t, x: rec.rhs(x, uf(t)), x0, times))
    else:
        raise UsageError(f"cannot simulate a {loaded.kind} file")
    text = sim.write_csv(tr)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    stream = sys.stderr if not args.output else sys.stdout
    print(f"samples: {len(tr)}", file=stream)
    print(f"final state: {json.dumps(tr.final.tolist())}", file=stream)
    print(f"max norm: {float(np.linalg.norm(tr.states, axis=1).max()):.17g}", file=stream)
    return EXIT_OK


def cmd_compare(args) -> int:
    loaded = io.load(args.input)
    _need(loaded, "linear")
    rec = loaded.record
    if args.orfile:
        ol = io.load(args.orfile)
        meta = ol.get("or_system")
        if ol.kind != "linear" or meta is None:
            raise UsageError("--or must be a file written by `orkit build`")
        W = meta.get("observer_map")
        F = meta.get("feedback_F")
        o = orsys.ORSystem(meta.get("kind", "exact"), ol.record.A, ol.record.B,
                           None if W is None else io.parse_matrix(W), ol.record.H,
                           None if F is None else io.parse_matrix(F),
                           meta.get("exactness", "approximate"), meta.get("init", "observer"),
                           time=rec.time)
    else:
        ns = argparse.Namespace(bridge=args.bridge)
        o = _build_linear(args.kind, loaded, ns)
        if o is None:
            print(NOT_INVARIANT, file=sys.stderr)
            return EXIT_ABSENT
    x0 = loaded.vector("x0")
    if x0 is None:
        x0 = np.random.default_rng(args.seed).standard_normal(rec.n)
    u = _input_signal(args.u, rec.m)
    rep = sim.compare(rec, o, np.asarray(x0, float), u, args.T, args.dt,
                      steps=args.steps)
    tol = eps_num()
    out = {"kind": o.kind, "exactness": o.exactness, **rep.as_dict(),
           "tolerance": tol, "within_tolerance": rep.worst <= tol}
    print(json.dumps(out, indent=2))
    return EXIT_OK


# --------------------------------------------------------------------------
# check


def _emit(args, human: list[str], data: dict) -> None:
    if args.json:
        print(json.dumps(data, indent=2, default=str))
    else:
        print("\n".join(human))


def cmd_check(args) -> int:
    loaded = io.load(args.input)
    what = args.what
    if what == "cayley":
        _need(loaded, "dk", "so", "linear")
        A = {"dk": lambda r: r, "so": lambda r: r.M, "linear": lambda r: r.A}[loaded.kind](loaded.record)
        b = _bridge(args.bridge, loaded)
        r = dkstp.cayley_hamilton_residual(A, b)
        data = {"residual": r, "tolerance": args.tol, "holds": r < args.tol}
        if A.shape[0] > A.shape[1]:
            data["residual_transposed"] = dkstp.cayley_hamilton_residual(A, b, transposed=True)
        _emit(args, [f"Cayley-Hamilton residual: {r:.3e} (tolerance {args.tol:g})"], data)
        return EXIT_OK if data["holds"] else EXIT_ABSENT
    if what == "nl-invariant":
        return _check_nl(args, loaded)
    _need(loaded, "linear")
    s = loaded.record.exact()
    if what == "a-invariant":
        cert = ss.is_A_invariant(s.H, s.A)
        data = {"invariant": cert is not None,
                "xi": None if cert is None else io.matrix_json(cert.xi)}
        human = [f"A-invariant: {cert is not None}"]
        if cert is not None:
            human.append(f"Xi: {_fmt(cert.xi)}")
        else:
            human.append(NOT_INVARIANT)
        _emit(args, human, data)
        return EXIT_OK if cert is not None else EXIT_ABSENT
    if what == "closure":
        trace: list = []
        W = ss.krylov_rows(s.H, s.A, trace)
        data = {"dimension": W.shape[0], "basis": io.matrix_json(W), "iterate_dims": trace}
        _emit(args, [f"A-invariant closure: dimension {W.shape[0]}", f"basis: {_fmt(W)}",
                     f"iterate dimensions: {trace}"], data)
        return EXIT_OK
    if what == "ab-invariant":
        cert = ss.is_ab_invariant(s.H, s.A, s.B)
        V = ss.largest_ab_invariant_in(s.A, s.B, ss.perp(ss.row_space(s.H)))
        closure, F = ss.ab_invariant_closure(s.H, s.A, s.B)
        data = {"observers_ab_invariant": cert is not None,
                "V_basis": io.matrix_json(V.basis), "V_dim": V.dim,
                "closure_basis": io.matrix_json(closure.basis), "friend": io.matrix_json(F)}
        _emit(args, [f"observers (A,B)-invariant: {cert is not None}",
                     f"largest (A,B)-invariant subspace in ker H: dimension {V.dim}",
                     f"V basis (columns): {_fmt(V.basis)}",
                     f"closure rows: {_fmt(closure.basis)}", f"friend F: {_fmt(F)}"], data)
        return EXIT_OK
    if what == "ddp":
        dist = [io.parse_vector(d) for d in args.xi] if args.xi else list(s.disturbances)
        if not dist:
            raise UsageError("no disturbances: pass --xi or add 'disturbances' to the file")
        res = orsys.ddp_check(s, [d.reshape(-1) for d in dist])
        data = {"solvable": res.solvable, "V_basis": io.matrix_json(res.V.basis)}
        _emit(args, [f"DDP solvable: {res.solvable}", f"V basis (columns): {_fmt(res.V.basis)}"],
              data)
        return EXIT_OK if res.solvable else EXIT_ABSENT
    raise UsageError(f"unknown check {what!r}")


def _check_nl(args, loaded) -> int:
    _need(loaded, "poly_affine")
    rec = loaded.record
    alpha = loaded.get("alpha")
    cand = loaded.get("candidate") or [str(h) for h in rec.h]
    cert = nonlin.is_invariant_exact_codistribution(rec, cand, alpha)
    try:
        om = nonlin.invariant_codistribution_iteration(rec)
        om_basis = om.constant_basis()
        om_text = _fmt(om_basis) if om_basis is not None else f"rank {om.rank} (non-constant)"
        om_hist = list(om.history)
    except BoundExceededError as err:
        om_basis, om_text, om_hist = None, f"not stationary: {err}", []
    data = {"candidate": cand, "alpha": alpha, "invariant": cert is not None,
            "omega_basis": io.matrix_json(om_basis), "omega_ranks": om_hist}
    human = [f"candidate {cand} invariant: {cert is not None}",
             f"Omega iteration: {om_text}, ranks {om_hist}"]
    if cert is not None:
        data["drift"] = [str(p) for p in cert.drift]
        data["input"] = [[str(q) for q in row] for row in cert.input]
        human.append("drift in z: " + ", ".join(str(p) for p in cert.drift))
    _emit(args, human, data)
    return EXIT_OK if cert is not None else EXIT_ABSENT


# --------------------------------------------------------------------------
# repro


def cmd_repro(args) -> int:
    checks = repro.run(args.filter)
    for c in checks:
        print(c.line(show_values=not args.quiet))
    counts = repro.summarize(checks)
    print(f"PASS {counts['PASS']}  ERRATUM {counts['ERRATUM']}  FAIL {counts['FAIL']}")
    if counts["FAIL"] or (args.strict_paper and counts["ERRATUM"]):
        return EXIT_VERIFY
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orkit", description="Observer-based realizations of control systems.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct an OR-system")
    b.add_argument("kind", choices=["projection", "pseudoinverse", "exact", "extended",
                                    "feedback", "singular"])
    b.add_argument("-i", "--input", required=True)
    b.add_argument("-o", "--output")
    b.add_argument("--bridge", default="projecting", choices=["projecting", "default", "pseudoinverse"])
    b.add_argument("--strict-paper", action="store_true",
                   help="exit 3 when the result differs from printed values in the file")
    b.add_argument("--show-errata", action="store_true")
    b.set_defaults(func=cmd_build)

    s = sub.add_parser("sim", help="simulate a system file to CSV")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output")
    s.add_argument("--u", default="zero", help="zero | step | sine | csv:PATH")
    s.add_argument("--T", type=float, default=1.0)
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--steps", type=int)
    s.add_argument("--bridge", default="projecting", choices=["projecting", "default"])
    s.set_defaults(func=cmd_sim)

    c = sub.add_parser("compare", help="compare a system with one of its OR-systems")
    c.add_argument("-i", "--input", required=True)
    c.add_argument("--or", dest="orfile")
    c.add_argument("--kind", default="extended",
                   choices=["projection", "pseudoinverse", "exact", "extended", "feedback"])
    c.add_argument("--bridge", default="projecting", choices=["projecting", "default", "pseudoinverse"])
    c.add_argument("--u", default="sine")
    c.add_argument("--T", type=float, default=1.0)
    c.add_argument("--dt", type=float, default=1e-3)
    c.add_argument("--steps", type=int)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_compare)

    k = sub.add_parser("check", help="verify a structural property")
    k.add_argument("what", choices=["a-invariant", "ab-invariant", "closure", "cayley", "ddp",
                                    "nl-invariant"])
    k.add_argument("-i", "--input", required=True)
    k.add_argument("--json", action="store_true", help="print a JSON report")
    k.add_argument("--bridge", default="projecting", choices=["projecting", "default", "pseudoinverse"])
    k.add_argument("--tol", type=float, default=1e-8)
    k.add_argument("--xi", action="append", type=lambda s: s.split(","),
                   help="disturbance direction as comma-separated entries (repeatable)")
    k.set_defaults(func=cmd_check)

    r = sub.add_parser("repro", help="re-derive the bundled reference examples")
    r.add_argument("--filter")
    r.add_argument("--strict-paper", action="store_true", help="count errata as failures")
    r.add_argument("--quiet", action="store_true", help="omit printed/computed values")
    r.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        eps_num()
        return args.func(args)
    except (UsageError, SchemaError, ShapeError) as err:
        print(f"orkit: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"orkit: error: {err.strerror or err}: {err.filename}", file=sys.stderr)
        return EXIT_USAGE
    except (OrkitError, ValueError) as err:
        print(f"orkit: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
