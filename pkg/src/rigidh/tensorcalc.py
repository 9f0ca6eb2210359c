"""Dimension-generic tensor calculus over metric providers.

A metric provider is anything with an integer attribute ``n`` and a method
``metric_jets(pt) -> (g, dg, d2g)`` where dg[i,j,k] = d_k g_ij and
d2g[i,j,k,l] = d_k d_l g_ij. Providers backed by exact jets feed the
high-accuracy paths; FiniteDifferenceMetric wraps any pointwise metric
function for cross-checking.

Curvature sign convention: R^i_jkl = d_k G^i_jl - d_l G^i_jk + G G - G G,
chosen so the unit 2-sphere satisfies R^i_jkl = K(delta^i_k g_jl -
delta^i_l g_jk) with K = +1.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateMetric, NonFinite

FD_STEP_SCALE = float(np.cbrt(np.finfo(float).eps))
FD_STEP2_SCALE = float(np.finfo(float).eps ** 0.25)
SIGNATURE_REL_TOL = 1e-10


def fd_step(x: float) -> float:
    """Central-difference step for coordinate value x."""
    return FD_STEP_SCALE * max(1.0, abs(x))


def fd_step2(x: float) -> float:
    """Step for second differences; larger, to balance the 1/h^2 roundoff."""
    return FD_STEP2_SCALE * max(1.0, abs(x))


def fd_partials(f, pt, shape=()):
    """First partials of an array-valued function by central differences.

    Returns an array of ``shape + (n,)``; the last axis is the derivative
    direction.
    """
    pt = np.asarray(pt, dtype=float)
    n = pt.shape[0]
    out = np.zeros(shape + (n,))
    for k in range(n):
        h = fd_step(pt[k])
        lo, hi = pt.copy(), pt.copy()
        lo[k] -= h
        hi[k] += h
        out[..., k] = (np.asarray(f(hi)) - np.asarray(f(lo))) / (2.0 * h)
    return out


def fd_second_partials(f, pt, shape=()):
    """Second partials by second-order central differences; shape + (n, n)."""
    pt = np.asarray(pt, dtype=float)
    n = pt.shape[0]
    out = np.zeros(shape + (n, n))
    f0 = np.asarray(f(pt))
    for k in range(n):
        hk = fd_step2(pt[k])
        lo, hi = pt.copy(), pt.copy()
        lo[k] -= hk
        hi[k] += hk
        out[..., k, k] = (np.asarray(f(hi)) - 2.0 * f0 + np.asarray(f(lo))) / hk ** 2
        for l in range(k + 1, n):
            hl = fd_step2(pt[l])
            pp, pm, mp, mm = pt.copy(), pt.copy(), pt.copy(), pt.copy()
            pp[[k, l]] += [hk, hl]
            pm[k] += hk
            pm[l] -= hl
            mp[k] -= hk
            mp[l] += hl
            mm[[k, l]] -= [hk, hl]
            mixed = (np.asarray(f(pp)) - np.asarray(f(pm))
                     - np.asarray(f(mp)) + np.asarray(f(mm))) / (4.0 * hk * hl)
            out[..., k, l] = mixed
            out[..., l, k] = mixed
    return out


class ConstantMetric:
    """Flat provider: the same symmetric matrix everywhere."""

    def __init__(self, g):
        self.g = np.asarray(g, dtype=float)
        self.n = self.g.shape[0]

    def metric(self, pt):
        return self.g.copy()

    def metric_jets(self, pt):
        n = self.n
        return self.g.copy(), np.zeros((n, n, n)), np.zeros((n, n, n, n))


class Sphere2Metric:
    """Unit 2-sphere, coordinates (theta, phi): ds^2 = dtheta^2 + sin^2 dphi^2."""

    n = 2

    def metric(self, pt):
        th = pt[0]
        return np.diag([1.0, np.sin(th) ** 2])

    def metric_jets(self, pt):
        th = pt[0]
        s, c = np.sin(th), np.cos(th)
        g = np.diag([1.0, s * s])
        dg = np.zeros((2, 2, 2))
        dg[1, 1, 0] = 2.0 * s * c
        d2g = np.zeros((2, 2, 2, 2))
        d2g[1, 1, 0, 0] = 2.0 * (c * c - s * s)
        return g, dg, d2g


class FiniteDifferenceMetric:
    """Provider built from a pointwise metric function; dg and d2g by
    central differences. The independent cross-path for analytic providers."""

    def __init__(self, metric_fn, n):
        self._fn = metric_fn
        self.n = n

    def metric(self, pt):
        return np.asarray(self._fn(pt), dtype=float)

    def metric_jets(self, pt):
        g, dg = self.metric_jets1(pt)
        d2g = fd_second_partials(self._fn, pt, shape=(self.n, self.n))
        return g, dg, d2g

    def metric_jets1(self, pt):
        return self.metric(pt), fd_partials(self._fn, pt, shape=(self.n, self.n))


def _inverse(g, pt):
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise DegenerateMetric(f"metric singular at {pt}") from exc
    if not np.all(np.isfinite(ginv)):
        raise NonFinite(f"non-finite metric inverse at {pt}")
    return ginv


def christoffel_at(m, pt, with_derivatives=False):
    """Christoffel symbols G[i,j,k] = G^i_jk; optionally dG[i,j,k,l] = d_l G^i_jk."""
    if not with_derivatives and hasattr(m, "metric_jets1"):
        g, dg = m.metric_jets1(pt)
        d2g = None
    else:
        g, dg, d2g = m.metric_jets(pt)
    ginv = _inverse(g, pt)
    # B[l,j,k] = d_j g_lk + d_k g_jl - d_l g_jk
    B = (np.einsum("lkj->ljk", dg) + np.einsum("jlk->ljk", dg)
         - np.einsum("jkl->ljk", dg))
    gamma = 0.5 * np.einsum("il,ljk->ijk", ginv, B)
    if not with_derivatives:
        return gamma
    # d_m B[l,j,k] from d2g[i,j,k,l] = d_k d_l g_ij
    dB = (np.einsum("lkjm->ljkm", d2g) + np.einsum("jlkm->ljkm", d2g)
          - np.einsum("jklm->ljkm", d2g))
    dginv = -np.einsum("ip,pqm,ql->ilm", ginv, dg, ginv)
    dgamma = 0.5 * (np.einsum("ilm,ljk->ijkm", dginv, B)
                    + np.einsum("il,ljkm->ijkm", ginv, dB))
    return gamma, dgamma


def riemann_at(m, pt):
    """Curvature tensor R[i,j,k,l] = R^i_jkl."""
    gamma, dgamma = christoffel_at(m, pt, with_derivatives=True)
    R = (np.einsum("ijlk->ijkl", dgamma) - np.einsum("ijkl->ijkl", dgamma)
         + np.einsum("ikm,mjl->ijkl", gamma, gamma)
         - np.einsum("ilm,mjk->ijkl", gamma, gamma))
    return R


def covariant_derivative_sym2(m, T, pt, dT=None):
    """Covariant derivative out[i,j,k] = T_ij;k of a symmetric 2-tensor field.

    ``T`` is either a callable pt -> (n, n) array, or the tensor value at
    ``pt`` when ``dT`` (partials, index layout [i,j,k] = d_k T_ij) is given.
    Without ``dT`` the partials fall back to central finite differences.
    """
    gamma = christoffel_at(m, pt)
    if callable(T):
        Tval = np.asarray(T(pt), dtype=float)
        if dT is None:
            dT = fd_partials(T, pt, shape=(m.n, m.n))
    else:
        Tval = np.asarray(T, dtype=float)
        if dT is None:
            raise ValueError("dT required when T is given as a value")
    nabla = (dT - np.einsum("mki,mj->ijk", gamma, Tval)
             - np.einsum("mkj,im->ijk", gamma, Tval))
    if not np.all(np.isfinite(nabla)):
        raise NonFinite(f"non-finite covariant derivative at {pt}")
    return nabla


def signature_at(m, pt):
    """(n_plus, n_minus) eigenvalue sign counts of g at pt."""
    g = (m.metric(pt) if hasattr(m, "metric")
         else m.metric_jets(pt)[0])
    eig = np.linalg.eigvalsh(g)
    tol = SIGNATURE_REL_TOL * max(1.0, float(np.max(np.abs(eig))))
    if np.any(np.abs(eig) <= tol):
        raise DegenerateMetric(f"near-zero metric eigenvalue at {pt}")
    return int(np.sum(eig > 0)), int(np.sum(eig < 0))
