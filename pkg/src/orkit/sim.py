"""Trajectories of DK-STP quasi-dynamic systems and of OR-systems.

A DK system ``y' = A (x) y`` with A of shape m x n accepts an initial value
of any dimension q. Its state first jumps to ``y(0+) = Psi[m, q] y0`` and
then evolves in R^m. Controlled and OR-system runs use fixed-step RK4.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dkstp import Bridge, bridge_matrix, dk_action, phi1, pi_A
from .errors import ShapeError
from .xspace import DimVector


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples ``states[k]`` at ``times[k]``.

    ``pre_state`` is the value before the initial jump when the initial
    condition did not live in the home dimension.
    """

    times: np.ndarray
    states: np.ndarray
    pre_state: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        s = np.atleast_2d(np.asarray(self.states, dtype=float))
        if s.shape[0] != t.size:
            raise ShapeError(f"{t.size} times but {s.shape[0]} states")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)
        if self.pre_state is not None:
            object.__setattr__(self, "pre_state", np.asarray(self.pre_state, float).reshape(-1))

    @property
    def vectors(self) -> list[DimVector]:
        return [DimVector(s) for s in self.states]

    @property
    def initial_jump(self):
        if self.pre_state is None:
            return None
        return self.pre_state, self.states[0]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def __len__(self):
        return self.times.size


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(-1)


def _mat(A) -> np.ndarray:
    return np.atleast_2d(np.asarray(A, dtype=float))


def _input(u, m: int) -> Callable:
    """Normalize ``u`` (None, callable, constant vector) to ``t -> R^m``."""
    if u is None:
        zero = np.zeros(m)
        return lambda t: zero
    if callable(u):
        def f(t):
            v = _vec(u(t))
            if v.size != m:
                raise ShapeError(f"input has dimension {v.size}, expected {m}")
            return v
        return f
    c = _vec(u)
    if c.size != m:
        raise ShapeError(f"input has dimension {c.size}, expected {m}")
    return lambda t: c


def _grid(T: float, dt: float) -> np.ndarray:
    if T <= 0 or dt <= 0:
        raise ValueError("T and dt must be positive")
    k = int(round(T / dt))
    return np.arange(k + 1) * dt


# --------------------------------------------------------------------------
# discrete time


def sim_discrete(A, y0, steps: int, b: Bridge | None = None) -> Trajectory:
    """``y(1) = A (x) y0`` and ``y(t+1) = Pi_A y(t)`` afterwards."""
    return sim_discrete_controlled(A, None, y0, None, steps, b)


def sim_discrete_controlled(A, B, y0, u, steps: int, b: Bridge | None = None) -> Trajectory:
    """``y(1) = A (x) y0 + B u(0)`` then ``y(t+1) = Pi_A y(t) + B u(t)``.

    ``u`` maps a step index to an input vector. When ``y0`` already lies in
    R^m the trajectory starts at t = 0; otherwise it starts at t = 1 and
    ``y0`` is kept as the pre-jump state.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    A = _mat(A)
    m = A.shape[0]
    y0 = _vec(y0)
    if B is None:
        B = np.zeros((m, 1))
        u = None
    B = np.asarray(B, dtype=float).reshape(m, -1)
    uf = _input(u, B.shape[1])
    if steps == 0:
        return Trajectory([0.0], y0.reshape(1, -1))
    P = np.asarray(pi_A(A, b), dtype=float)
    ys = [dk_action(A, y0, b).entries + B @ uf(0)]
    for t in range(1, steps):
        ys.append(P @ ys[-1] + B @ uf(t))
    if y0.size == m:
        return Trajectory(np.arange(steps + 1), np.vstack([y0] + ys))
    return Trajectory(np.arange(1, steps + 1), np.vstack(ys), pre_state=y0)


def sim_linear_discrete(L, N, z0, u, steps: int) -> Trajectory:
    """Classical ``z(t+1) = L z(t) + N u(t)``."""
    L = _mat(L)
    z0 = _vec(z0)
    if z0.size != L.shape[0]:
        raise ShapeError(f"initial state has dimension {z0.size}, expected {L.shape[0]}")
    return sim_discrete_controlled(L, N, z0, u, steps)


# --------------------------------------------------------------------------
# continuous time


def series_solution(A, y0, t: float, b: Bridge | None = None) -> np.ndarray:
    """``Psi[m, q] y0 + A t phi1(t Psi[n, m] A) Psi[n, q] y0``."""
    A = _mat(A)
    m, n = A.shape
    y0 = _vec(y0)
    q = y0.size
    jumped = bridge_matrix(b, m, q) @ y0
    if t == 0:
        return jumped
    Z = t * (bridge_matrix(b, n, m) @ A)
    return jumped + t * (A @ (phi1(Z) @ (bridge_matrix(b, n, q) @ y0)))


def sim_continuous(A, y0, T: float, dt: float, b: Bridge | None = None) -> Trajectory:
    """Sample the series solution of ``y' = A (x) y`` on ``[0, T]``."""
    A = _mat(A)
    y0 = _vec(y0)
    times = _grid(T, dt)
    states = np.vstack([series_solution(A, y0, t, b) for t in times])
    pre = y0 if y0.size != A.shape[0] else None
    return Trajectory(times, states, pre_state=pre)


def rk4(f: Callable, y0, times) -> np.ndarray:
    """Classical fixed-step Runge-Kutta on the given grid."""
    y = _vec(y0).copy()
    out = np.empty((len(times), y.size))
    out[0] = y
    for k in range(len(times) - 1):
        t, h = times[k], times[k + 1] - times[k]
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = y
    return out


def sim_continuous_controlled(L, N, y0, u, T: float, dt: float) -> Trajectory:
    """RK4 integration of ``y' = L y + N u(t)`` from an already-jumped ``y0``."""
    L = _mat(L)
    p = L.shape[0]
    if L.shape != (p, p):
        raise ShapeError(f"L must be square, got {L.shape}")
    N = np.asarray(N, dtype=float).reshape(p, -1)
    y0 = _vec(y0)
    if y0.size != p:
        raise ShapeError(f"initial state has dimension {y0.size}, expected {p}")
    uf = _input(u, N.shape[1])
    times = _grid(T, dt)
    return Trajectory(times, rk4(lambda t, y: L @ y + N @ uf(t), y0, times))


def sim_dk_controlled(A, B, y0, u, T: float, dt: float, b: Bridge | None = None) -> Trajectory:
    """``y' = A (x) y + B u`` converted to ``y' = Pi_A y + B u`` after the jump."""
    A = _mat(A)
    m = A.shape[0]
    y0 = _vec(y0)
    jumped = bridge_matrix(b, m, y0.size) @ y0
    tr = sim_continuous_controlled(pi_A(A, b), B, jumped, u, T, dt)
    if y0.size == m:
        return tr
    return Trajectory(tr.times, tr.states, pre_state=y0)


# --------------------------------------------------------------------------
# original vs OR-system


@dataclass(frozen=True)
class CompareReport:
    max_err: np.ndarray
    rms_err: np.ndarray
    original: Trajectory
    reduced: Trajectory

    @property
    def worst(self) -> float:
        return float(self.max_err.max()) if self.max_err.size else 0.0

    def as_dict(self) -> dict:
        return {"max_err": self.max_err.tolist(), "rms_err": self.rms_err.tolist(),
                "worst": self.worst}


def compare(sys, orsys, x0, u=None, T: float = 1.0, dt: float = 1e-3,
            steps: int | None = None) -> CompareReport:
    """Simulate the original system and the OR-system and compare outputs.

    The original runs under ``u = F x + v`` when the OR-system carries a
    feedback ``F``; both then receive the same ``v``. Outputs are ``H x``
    and ``selector z``.
    """
    A = np.asarray(sys.A, dtype=float)
    B = np.asarray(sys.B, dtype=float)
    H = np.asarray(sys.H, dtype=float)
    if orsys.feedback_F is not None:
        A = A + B @ np.asarray(orsys.feedback_F, dtype=float)
    x0 = _vec(x0)
    if x0.size != A.shape[0]:
        raise ShapeError(f"x0 has dimension {x0.size}, expected {A.shape[0]}")
    if orsys.observer_map is None:
        z0 = H @ x0
    else:
        z0 = orsys.initial_state(x0=x0)
    S = np.asarray(orsys.selector, dtype=float)
    if sys.time == "discrete":
        n_steps = steps if steps is not None else int(round(T))
        full = sim_linear_discrete(A, B, x0, u, n_steps)
        red = sim_linear_discrete(orsys.L, orsys.N, z0, u, n_steps)
    else:
        full = sim_continuous_controlled(A, B, x0, u, T, dt)
        red = sim_continuous_controlled(orsys.L, orsys.N, z0, u, T, dt)
    err = full.states @ H.T - red.states @ S.T
    return CompareReport(np.abs(err).max(axis=0), np.sqrt((err ** 2).mean(axis=0)), full, red)


# --------------------------------------------------------------------------
# CSV


def _g(x: float) -> str:
    return "%.17g" % x


def write_csv(traj: Trajectory, fh=None) -> str | None:
    """Write ``t,y1..yK,jump``; returns the text when ``fh`` is None.

    A jump is written as a ``pre`` row holding the raw initial value and a
    ``post`` row holding the jumped state, both at the first sample time
    (t = 0 for continuous runs). Shorter rows are padded with empty cells.
    """
    K = traj.states.shape[1]
    if traj.pre_state is not None:
        K = max(K, traj.pre_state.size)
    own = fh is None
    if own:
        fh = io.StringIO()
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t"] + [f"y{i + 1}" for i in range(K)] + ["jump"])

    def row(t, y, flag=""):
        cells = [_g(v) for v in y] + [""] * (K - len(y))
        w.writerow([_g(t)] + cells + [flag])

    start = 0
    if traj.pre_state is not None:
        t0 = 0.0
        row(t0, traj.pre_state, "pre")
        if traj.times[0] == t0:
            row(t0, traj.states[0], "post")
            start = 1
    for t, y in zip(traj.times[start:], traj.states[start:]):
        row(t, y)
    return fh.getvalue() if own else None


def read_csv(text: str) -> Trajectory:
    """Inverse of ``write_csv``."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][0] != "t" or rows[0][-1] != "jump":
        raise ValueError("not a trajectory CSV: bad header")
    times, states, pre = [], [], None
    for r in rows[1:]:
        if not r:
            continue
        vals = [float(c) for c in r[1:-1] if c != ""]
        if r[-1] == "pre":
            pre = vals
            continue
        times.append(float(r[0]))
        states.append(vals)
    return Trajectory(times, np.array(states), pre_state=pre)
