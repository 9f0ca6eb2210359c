"""The six-dimensional [2211]-type rigid h-space family.

Builds the metric g, the companion tensor h and the trace scalar phi at any
point, together with exact first and second coordinate partials obtained by
propagating 2-jets of the four free scalar functions through the component
formulas.

Coordinate convention: points are length-6 arrays, x[0]..x[5] standing for
x^1..x^6. The double characteristic roots f2, f4 live on coordinates x^2 and
x^4; the simple roots f5, f6 on x^5 and x^6.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DegenerateMetric, NonFinite, RootCollision, ZeroA
from .funcjet import Jet2, ScalarFunction, eval_jet2, function_from_spec
from .jetn import Jet0N, Jet1N, JetN

DIM = 6
PHI_TRACE_DIVISOR = 2 * DIM + 2  # 14: trace normalization of the phi scalar

COLLISION_REL_TOL = 1e-9
DEGENERACY_REL_TOL = 1e-12

# (i, j) slots of the independent nonzero components, in a fixed order:
# g12, g22, g34, g44, g55, g66 (0-based indices).
_SLOTS = ((0, 1), (1, 1), (2, 3), (3, 3), (4, 4), (5, 5))


@dataclass(frozen=True)
class HSpaceParams:
    """Full parameterization of the [2211] metric family."""

    epsilon: int
    epsilon_tilde: int
    a: float
    c: float
    e2: int
    e4: int
    e5: int
    e6: int
    theta: ScalarFunction   # function of x^2
    omega: ScalarFunction   # function of x^4
    f5: ScalarFunction      # function of x^5
    f6: ScalarFunction      # function of x^6

    def __post_init__(self):
        if self.epsilon not in (0, 1):
            raise ConfigError(f"epsilon must be 0 or 1, got {self.epsilon}")
        if self.epsilon_tilde not in (0, 1):
            raise ConfigError(
                f"epsilon_tilde must be 0 or 1, got {self.epsilon_tilde}")
        for name in ("e2", "e4", "e5", "e6"):
            if getattr(self, name) not in (-1, 1):
                raise ConfigError(
                    f"{name} must be -1 or +1, got {getattr(self, name)}")
        if self.epsilon_tilde == 0 and self.a == 0:
            raise ConfigError("a must be nonzero when epsilon_tilde=0")

    def spec(self) -> dict:
        return {
            "epsilon": self.epsilon, "epsilon_tilde": self.epsilon_tilde,
            "a": self.a, "c": self.c,
            "e2": self.e2, "e4": self.e4, "e5": self.e5, "e6": self.e6,
            "theta": self.theta.spec(), "omega": self.omega.spec(),
            "f5": self.f5.spec(), "f6": self.f6.spec(),
        }

    @classmethod
    def from_spec(cls, rec: dict, where: str = "params") -> "HSpaceParams":
        if not isinstance(rec, dict):
            raise ConfigError(f"{where}: expected a record, got {rec!r}")
        known = {"epsilon", "epsilon_tilde", "a", "c",
                 "e2", "e4", "e5", "e6", "theta", "omega", "f5", "f6"}
        extra = set(rec) - known
        if extra:
            raise ConfigError(f"{where}: unexpected keys {sorted(extra)}")
        kwargs = {}
        for name in ("epsilon", "epsilon_tilde", "e2", "e4", "e5", "e6"):
            if name not in rec:
                raise ConfigError(f"{where}.{name}: required")
            val = rec[name]
            if not isinstance(val, int) or isinstance(val, bool):
                raise ConfigError(f"{where}.{name}: expected an integer")
            kwargs[name] = val
        for name in ("a", "c"):
            if name not in rec:
                raise ConfigError(f"{where}.{name}: required")
            if not isinstance(rec[name], (int, float)) or isinstance(rec[name], bool):
                raise ConfigError(f"{where}.{name}: expected a number")
            kwargs[name] = float(rec[name])
        for name in ("theta", "omega", "f5", "f6"):
            if name not in rec:
                raise ConfigError(f"{where}.{name}: required")
            kwargs[name] = function_from_spec(rec[name], where=f"{where}.{name}")
        return cls(**kwargs)


@dataclass(frozen=True)
class APair:
    """Value of A (or A-tilde) with its two nonzero first partials."""

    value: float
    d_lin: float   # d/dx^1 = epsilon (resp. d/dx^3 = epsilon_tilde)
    d_fun: float   # d/dx^2 = theta'  (resp. d/dx^4 = omega')


@dataclass(frozen=True)
class RootsAt:
    """Characteristic roots and A-factors at a point, with their jets."""

    f2: Jet2
    f4: Jet2
    f5: Jet2
    f6: Jet2
    A: APair
    Atilde: APair

    def values(self):
        return (self.f2.value, self.f4.value, self.f5.value, self.f6.value)


def _check_point(pt) -> np.ndarray:
    pt = np.asarray(pt, dtype=float)
    if pt.shape != (DIM,):
        raise ConfigError(f"expected a length-{DIM} point, got shape {pt.shape}")
    if not np.all(np.isfinite(pt)):
        raise NonFinite(f"non-finite point {pt}")
    return pt


def roots_at(params: HSpaceParams, pt) -> RootsAt:
    """Evaluate the four characteristic roots and the A-factors at ``pt``.

    Raises RootCollision if any two roots approach each other (the rigidity
    guard) and ZeroA if A or A-tilde vanishes.
    """
    pt = _check_point(pt)
    f2 = Jet2(params.epsilon * pt[1], float(params.epsilon), 0.0)
    f4 = Jet2(params.epsilon_tilde * pt[3] + params.a,
              float(params.epsilon_tilde), 0.0)
    f5 = eval_jet2(params.f5, pt[4])
    f6 = eval_jet2(params.f6, pt[5])
    th = eval_jet2(params.theta, pt[1])
    om = eval_jet2(params.omega, pt[3])
    A = APair(params.epsilon * pt[0] + th.value, float(params.epsilon), th.d1)
    At = APair(params.epsilon_tilde * pt[2] + om.value,
               float(params.epsilon_tilde), om.d1)

    vals = (f2.value, f4.value, f5.value, f6.value)
    scale = max(1.0, max(abs(v) for v in vals))
    tol = COLLISION_REL_TOL * scale
    names = ("f2", "f4", "f5", "f6")
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(vals[i] - vals[j]) <= tol:
                raise RootCollision(
                    f"{names[i]}={vals[i]} collides with {names[j]}={vals[j]} "
                    f"at {pt} (tol {tol:g})")
    a_tol = COLLISION_REL_TOL * max(1.0, abs(pt[0]), abs(th.value))
    if abs(A.value) <= a_tol:
        raise ZeroA(f"A vanishes at {pt}")
    at_tol = COLLISION_REL_TOL * max(1.0, abs(pt[2]), abs(om.value))
    if abs(At.value) <= at_tol:
        raise ZeroA(f"A-tilde vanishes at {pt}")
    return RootsAt(f2, f4, f5, f6, A, At)


def _component_jets(params: HSpaceParams, pt,
                    roots: Optional[RootsAt] = None, order: int = 2):
    """The six independent metric components, h components and the conformal
    factor as 6-variable jets of the requested order (2 by default, 1 as a
    cheaper path when no second derivatives are needed)."""
    pt = _check_point(pt)
    if roots is None:
        roots = roots_at(params, pt)
    jet = {0: Jet0N, 1: Jet1N, 2: JetN}[order]

    f2 = jet.from_jet2(roots.f2, 1, DIM)
    f4 = jet.from_jet2(roots.f4, 3, DIM)
    f5 = jet.from_jet2(roots.f5, 4, DIM)
    f6 = jet.from_jet2(roots.f6, 5, DIM)

    th = eval_jet2(params.theta, pt[1])
    om = eval_jet2(params.omega, pt[3])
    A = params.epsilon * jet.variable(pt[0], 0, DIM) + jet.from_jet2(th, 1, DIM)
    At = (params.epsilon_tilde * jet.variable(pt[2], 2, DIM)
          + jet.from_jet2(om, 3, DIM))

    d42 = f4 - f2
    d52 = f5 - f2
    d62 = f6 - f2
    d54 = f5 - f4
    d64 = f6 - f4
    d65 = f6 - f5

    P2 = d42 ** 2 * d52 * d62
    S1 = 2.0 / d42 + d52.reciprocal() + d62.reciprocal()
    g12 = params.e2 * P2 * A
    g22 = -params.e2 * P2 * A ** 2 * S1

    P4 = d42 ** 2 * d54 * d64
    S2 = -2.0 / d42 + d54.reciprocal() + d64.reciprocal()
    g34 = params.e4 * P4 * At
    g44 = -params.e4 * P4 * At ** 2 * S2

    g55 = params.e5 * d52 ** 2 * d54 ** 2 * d65
    g66 = params.e6 * d62 ** 2 * d64 ** 2 * (-d65)

    S = 2.0 * f2 + 2.0 * f4 + f5 + f6 + params.c
    h12 = (f2 + S) * g12
    h22 = f2 * g22 + A * g12 + S * g22
    h34 = (f4 + S) * g34
    h44 = f4 * g44 + At * g34 + S * g44
    h55 = (f5 + S) * g55
    h66 = (f6 + S) * g66

    return {
        "g": (g12, g22, g34, g44, g55, g66),
        "h": (h12, h22, h34, h44, h55, h66),
        "S": S,
    }


def _assemble_values(comps) -> np.ndarray:
    m = np.zeros((DIM, DIM))
    for (i, j), c in zip(_SLOTS, comps):
        m[i, j] = c.v
        m[j, i] = c.v
    return m


def _assemble_jets(comps):
    """(values, d[i,j,k] = d_k T_ij, d2[i,j,k,l] = d_k d_l T_ij)."""
    val = np.zeros((DIM, DIM))
    d1 = np.zeros((DIM, DIM, DIM))
    d2 = np.zeros((DIM, DIM, DIM, DIM))
    for (i, j), c in zip(_SLOTS, comps):
        val[i, j] = val[j, i] = c.v
        d1[i, j] = d1[j, i] = c.g
        d2[i, j] = d2[j, i] = c.h
    return val, d1, d2


def _check_nondegenerate(g: np.ndarray, pt):
    # Hadamard-style determinant scale: blocks of g differ by orders of
    # magnitude, so a single max-entry scale would misfire.
    scale = float(np.prod(np.maximum(np.linalg.norm(g, axis=1), 1e-30)))
    if abs(float(np.linalg.det(g))) <= DEGENERACY_REL_TOL * scale:
        raise DegenerateMetric(f"metric degenerate at {pt}")


def metric_at(params: HSpaceParams, pt) -> np.ndarray:
    """Metric g as a symmetric 6x6 matrix."""
    g = _assemble_values(_component_jets(params, pt, order=0)["g"])
    _check_nondegenerate(g, pt)
    return g


def metric_jets_at(params: HSpaceParams, pt):
    """(g, dg, d2g) with dg[i,j,k] = d_k g_ij and d2g[i,j,k,l] = d_k d_l g_ij."""
    g, dg, d2g = _assemble_jets(_component_jets(params, pt)["g"])
    _check_nondegenerate(g, pt)
    return g, dg, d2g


def metric_jets1_at(params: HSpaceParams, pt):
    """(g, dg) only, via order-1 jets; cheaper when curvature is not needed."""
    g = np.zeros((DIM, DIM))
    dg = np.zeros((DIM, DIM, DIM))
    comps = _component_jets(params, pt, order=1)["g"]
    for (i, j), c in zip(_SLOTS, comps):
        g[i, j] = g[j, i] = c.v
        dg[i, j] = dg[j, i] = c.g
    _check_nondegenerate(g, pt)
    return g, dg


def h_tensor_at(params: HSpaceParams, pt) -> np.ndarray:
    """Companion tensor h as a symmetric 6x6 matrix."""
    comps = _component_jets(params, pt, order=0)
    _check_nondegenerate(_assemble_values(comps["g"]), pt)
    return _assemble_values(comps["h"])


def values_at(params: HSpaceParams, pt):
    """(g, h) values in one component evaluation."""
    comps = _component_jets(params, pt, order=0)
    g = _assemble_values(comps["g"])
    _check_nondegenerate(g, pt)
    return g, _assemble_values(comps["h"])


def phi_at(params: HSpaceParams, pt) -> float:
    """The trace scalar phi = tr(g^{-1} h) / 14 (value only)."""
    g, h = values_at(params, pt)
    return float(np.einsum("ij,ij->", np.linalg.inv(g), h)) / PHI_TRACE_DIVISOR


def killing_form_at(params: HSpaceParams, pt) -> np.ndarray:
    """The quadratic-first-integral form a = h - 4 phi g."""
    g, h = values_at(params, pt)
    phi = float(np.einsum("ij,ij->", np.linalg.inv(g), h)) / PHI_TRACE_DIVISOR
    return h - 4.0 * phi * g


def h_jets_at(params: HSpaceParams, pt):
    """(h, dh, d2h), same index layout as metric_jets_at."""
    comps = _component_jets(params, pt)
    _check_nondegenerate(_assemble_values(comps["g"]), pt)
    return _assemble_jets(comps["h"])


def phi_gradient_at(params: HSpaceParams, pt):
    """The scalar phi = tr(g^{-1} h) / 14 and its coordinate gradient.

    The additive constant of phi is fixed by the trace normalization.
    """
    comps = _component_jets(params, pt)
    g, dg, _ = _assemble_jets(comps["g"])
    h, dh, _ = _assemble_jets(comps["h"])
    _check_nondegenerate(g, pt)
    ginv = np.linalg.inv(g)
    phi = float(np.einsum("ij,ij->", ginv, h)) / PHI_TRACE_DIVISOR
    # d_k g^{ij} = -g^{im} (d_k g_mn) g^{nj}
    dginv = -np.einsum("im,mnk,nj->ijk", ginv, dg, ginv)
    grad = (np.einsum("ijk,ij->k", dginv, h)
            + np.einsum("ij,ijk->k", ginv, dh)) / PHI_TRACE_DIVISOR
    return phi, grad


class HSpaceMetric:
    """MetricProvider view of an HSpaceParams instance (analytic jets)."""

    def __init__(self, params: HSpaceParams):
        self.params = params
        self.n = DIM

    def metric(self, pt) -> np.ndarray:
        return metric_at(self.params, pt)

    def metric_jets(self, pt):
        return metric_jets_at(self.params, pt)

    def metric_jets1(self, pt):
        return metric_jets1_at(self.params, pt)
