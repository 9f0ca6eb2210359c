"""Geodesic integration with conservation monitoring.

Uses a Dormand-Prince 5(4) embedded pair with PI step-size control. Provider
errors (root collisions, metric degeneracy) act as a hard wall: the step is
rejected and retried smaller, and the run halts with diagnostics if the step
underflows, rather than extrapolating across the boundary.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import tensorcalc as tc
from .errors import NonFinite, RigidHError, StepSizeUnderflow

# Dormand-Prince 5(4) tableau; row 7 (the FSAL stage) doubles as the
# 5th-order solution weights.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784,
                11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                -92097 / 339200, 187 / 2100, 1 / 40])
_ORDER = 5
_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
# PI controller exponents (Gustafsson-style)
_BETA1 = 0.7 / _ORDER
_BETA2 = 0.4 / _ORDER


@dataclass
class GeodesicState:
    x: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.v))):
            raise NonFinite(f"non-finite geodesic state {self}")


@dataclass
class ConservationTrace:
    """Values of the monitored quadratic forms at every accepted step."""

    names: list
    t: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in self.names:
            self.values.setdefault(name, [])

    def record(self, t, vals):
        self.t.append(float(t))
        for name, v in zip(self.names, vals):
            self.values[name].append(float(v))

    def initial(self, name):
        return self.values[name][0]

    def drift(self, name) -> float:
        vals = np.asarray(self.values[name])
        q0 = vals[0]
        return float(np.max(np.abs(vals - q0)) / max(1.0, abs(q0)))


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray

    @property
    def final_state(self) -> GeodesicState:
        return GeodesicState(self.x[-1], self.v[-1], float(self.t[-1]))


def geodesic_rhs(m, state: GeodesicState):
    """dx/dt = v, dv/dt = -Gamma^i_jk v^j v^k."""
    gamma = tc.christoffel_at(m, state.x)
    acc = -np.einsum("ijk,j,k->i", gamma, state.v, state.v)
    return state.v, acc


def _rhs_flat(m, t, y):
    n = y.shape[0] // 2
    st = GeodesicState(y[:n], y[n:], t)
    dx, dv = geodesic_rhs(m, st)
    return np.concatenate([dx, dv])


def integrate(m, initial: GeodesicState, t_end: float, rel_tol: float = 1e-10,
              conserved: Sequence = (), max_step: float = None,
              fixed_step: float = None):
    """Integrate the geodesic equation from ``initial`` to affine time t_end.

    ``conserved`` is a sequence of (name, fn) pairs where fn(x) returns the
    symmetric matrix of a quadratic form in the velocity; each form is
    sampled at every accepted step. ``max_step`` caps the accepted step size
    (error control still applies). ``fixed_step`` disables adaptivity (used
    by convergence-order tests only).

    Returns (Trajectory, ConservationTrace). Raises StepSizeUnderflow (with
    the partial trajectory attached) if the step collapses at a domain
    boundary.
    """
    if not (1e-13 <= rel_tol <= 1e-3):
        raise ValueError(f"rel_tol {rel_tol} outside [1e-13, 1e-3]")
    n = m.n
    y = np.concatenate([initial.x, initial.v])
    t = float(initial.t)
    direction = 1.0 if t_end >= t else -1.0
    span = abs(t_end - t)
    atol = rel_tol

    names = [name for name, _ in conserved]
    forms = [fn for _, fn in conserved]
    trace = ConservationTrace(names=names)

    def monitor(tt, yy):
        x, v = yy[:n], yy[n:]
        trace.record(tt, [float(v @ fn(x) @ v) for fn in forms])

    ts, ys = [t], [y.copy()]
    monitor(t, y)

    k = np.zeros((7, 2 * n))
    k[0] = _rhs_flat(m, t, y)
    h = fixed_step if fixed_step is not None else min(span, 1e-2 * max(span, 1.0))
    err_prev = 1.0

    while True:
        remaining = (t_end - t) * direction
        if remaining <= 1e-14 * max(1.0, span):
            break
        h = min(h, remaining)
        if max_step is not None:
            h = min(h, max_step)
        if h <= 1e-14 * max(1.0, span):
            raise StepSizeUnderflow(
                f"step size underflow at t={t}", t=t,
                state=GeodesicState(y[:n], y[n:], t),
                trajectory=Trajectory(np.asarray(ts), np.asarray(ys)[:, :n],
                                      np.asarray(ys)[:, n:]))
        hs_ = h * direction
        try:
            for i in range(1, 7):
                yi = y + hs_ * sum(a * k[j] for j, a in enumerate(_A[i]))
                k[i] = _rhs_flat(m, t + _C[i] * hs_, yi)
            y5 = y + hs_ * (_B5 @ k)
            y4 = y + hs_ * (_B4 @ k)
        except RigidHError:
            # hard wall: shrink and retry
            h *= 0.25
            continue
        if not np.all(np.isfinite(y5)):
            h *= 0.25
            continue

        scale = atol + rel_tol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.sqrt(np.mean(((y5 - y4) / scale) ** 2)))

        if fixed_step is not None or err <= 1.0:
            t += hs_
            y = y5
            k[0] = k[6]  # FSAL
            ts.append(t)
            ys.append(y.copy())
            monitor(t, y)
            if fixed_step is None:
                factor = _SAFETY * (max(err, 1e-16) ** -_BETA1
                                    * err_prev ** _BETA2)
                h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
                err_prev = max(err, 1e-16)
        else:
            h *= max(_MIN_FACTOR, _SAFETY * err ** (-1.0 / _ORDER))

    ys = np.asarray(ys)
    return Trajectory(np.asarray(ts), ys[:, :n], ys[:, n:]), trace


def write_trajectory_csv(path, traj: Trajectory, trace: ConservationTrace):
    """CSV export: t, x1..xn, v1..vn, then one column per monitored form."""
    n = traj.x.shape[1]
    header = (["t"] + [f"x{i + 1}" for i in range(n)]
              + [f"v{i + 1}" for i in range(n)] + list(trace.names))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i, t in enumerate(traj.t):
            row = ([repr(float(t))]
                   + [repr(float(v)) for v in traj.x[i]]
                   + [repr(float(v)) for v in traj.v[i]]
                   + [repr(trace.values[name][i]) for name in trace.names])
            w.writerow(row)
