"""Residual checks certifying the defining equations of the h-space family.

Every check reports an absolute and a relative residual; the relative one is
normalized by the largest magnitude among the individual terms entering the
equation at that point, since metric entries span several orders of
magnitude and absolute thresholds would be meaningless.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import hspace2211 as hs
from . import tensorcalc as tc
from .errors import RigidHError

DEFAULT_TOL = 1e-8
FD_TOL = 1e-5


def _relative(abs_res: float, scale: float) -> float:
    if scale > 0.0:
        return abs_res / scale
    return 0.0 if abs_res == 0.0 else float("inf")


@dataclass
class VerificationReport:
    check: str
    tolerance: float
    sample: list
    max_abs_residual: float = 0.0
    max_rel_residual: float = 0.0
    n_points: int = 0
    n_skipped: int = 0
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (self.n_points > 0
                and self.max_rel_residual <= self.tolerance)

    def record(self, abs_res: float, rel_res: float):
        self.n_points += 1
        self.max_abs_residual = max(self.max_abs_residual, abs_res)
        self.max_rel_residual = max(self.max_rel_residual, rel_res)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "tolerance": self.tolerance,
            "sample": [list(map(float, p)) for p in self.sample],
            "max_abs_residual": self.max_abs_residual,
            "max_rel_residual": self.max_rel_residual,
            "n_points": self.n_points,
            "n_skipped": self.n_skipped,
            "verdict": "pass" if self.passed else "fail",
            **self.extras,
        }


@dataclass
class CurvatureVerdict:
    is_constant: bool
    K: float
    K_dispersion: float
    residuals: list

    def to_dict(self) -> dict:
        return {
            "is_constant": self.is_constant,
            "K": self.K,
            "K_dispersion": self.K_dispersion,
            "residuals": list(self.residuals),
        }


def sample_points(params, ranges, count, seed, max_tries=None):
    """Draw ``count`` valid points uniformly from the per-coordinate ranges,
    rejecting points that hit the rigidity or degeneracy guards.

    Returns (points, n_rejected). Raises RuntimeError if the acceptance rate
    is too low to fill the sample.
    """
    lo = np.array([r[0] for r in ranges], dtype=float)
    hi = np.array([r[1] for r in ranges], dtype=float)
    rng = np.random.default_rng(seed)
    if max_tries is None:
        max_tries = 200 * count
    pts, rejected = [], 0
    for _ in range(max_tries):
        if len(pts) >= count:
            break
        pt = rng.uniform(lo, hi)
        try:
            hs.roots_at(params, pt)
            hs.metric_at(params, pt)
        except RigidHError:
            rejected += 1
            continue
        pts.append(pt)
    if len(pts) < count:
        raise RuntimeError(
            f"could only sample {len(pts)}/{count} valid points "
            f"({rejected} rejected); widen the ranges")
    return pts, rejected


def _eisenhart_pieces(params, pt, mode="analytic"):
    """(nabla_h, g, phi, grad_phi, provider) for the requested derivative path."""
    if mode == "analytic":
        m = hs.HSpaceMetric(params)
        g, dg, _ = hs.metric_jets_at(params, pt)
        hv, dh, _ = hs.h_jets_at(params, pt)
        phi, grad = hs.phi_gradient_at(params, pt)
    elif mode == "fd":
        m = tc.FiniteDifferenceMetric(lambda p: hs.metric_at(params, p), hs.DIM)
        g = hs.metric_at(params, pt)
        dg = tc.fd_partials(lambda p: hs.metric_at(params, p), pt,
                            shape=(hs.DIM, hs.DIM))
        hv = hs.h_tensor_at(params, pt)
        dh = tc.fd_partials(lambda p: hs.h_tensor_at(params, p), pt,
                            shape=(hs.DIM, hs.DIM))
        phi = hs.phi_at(params, pt)
        grad = tc.fd_partials(lambda p: hs.phi_at(params, p), pt)
    else:
        raise ValueError(f"unknown derivative mode {mode!r}")
    nabla_h = tc.covariant_derivative_sym2(m, hv, pt, dT=dh)
    return nabla_h, g, dg, hv, dh, phi, grad, m


def _sym_source(g, grad):
    """2 g_ij phi_k + g_ik phi_j + g_jk phi_i."""
    return (2.0 * np.einsum("ij,k->ijk", g, grad)
            + np.einsum("ik,j->ijk", g, grad)
            + np.einsum("jk,i->ijk", g, grad))


def eisenhart_residual(params, pt, mode="analytic", h_perturbation=None):
    """Residual E_ijk = h_ij;k - (2 g_ij phi_k + g_ik phi_j + g_jk phi_i).

    Returns (E, max_abs, max_rel). ``mode`` selects the analytic-jet path or
    the finite-difference cross path. ``h_perturbation`` is an optional
    (i, j, factor) triple scaling one h component; a deliberately broken
    solution must be detected as a large residual.
    """
    nabla_h, g, _, hv, dh, _, grad, m = _eisenhart_pieces(params, pt, mode)
    if h_perturbation is not None:
        i, j, factor = h_perturbation
        hv = hv.copy()
        dh = dh.copy()
        hv[i, j] *= factor
        hv[j, i] = hv[i, j]
        dh[i, j] *= factor
        dh[j, i] = dh[i, j]
        nabla_h = tc.covariant_derivative_sym2(m, hv, pt, dT=dh)
    src = _sym_source(g, grad)
    E = nabla_h - src
    scale = max(float(np.max(np.abs(nabla_h))), float(np.max(np.abs(src))))
    abs_res = float(np.max(np.abs(E)))
    return E, abs_res, _relative(abs_res, scale)


def killing_tensor_residual(params, pt, phi_shift=0.0, mode="analytic"):
    """Symmetrized covariant derivative a_(ij;k) of a = h - 4 phi g.

    ``phi_shift`` adds a constant to phi; the verdict must be invariant
    under it since it changes a by a multiple of the covariantly constant g.
    """
    _, g, dg, hv, dh, phi, grad, m = _eisenhart_pieces(params, pt, mode)
    phi = phi + phi_shift
    a = hv - 4.0 * phi * g
    da = dh - 4.0 * (np.einsum("k,ij->ijk", grad, g) + phi * dg)
    nabla_a = tc.covariant_derivative_sym2(m, a, pt, dT=da)
    res = (nabla_a + np.einsum("jki->ijk", nabla_a)
           + np.einsum("kij->ijk", nabla_a))
    abs_res = float(np.max(np.abs(res)))
    return res, abs_res, _relative(abs_res, float(np.max(np.abs(nabla_a))))


def linearity_check(params, a1, a2, sample, tol=DEFAULT_TOL,
                    mode="analytic") -> VerificationReport:
    """h' = a1 h + a2 g with phi' gradient a1 * (phi gradient) must satisfy
    the same residual equation at every sample point."""
    report = VerificationReport(
        check=f"linearity(a1={a1}, a2={a2})", tolerance=tol,
        sample=list(sample), extras={"a1": a1, "a2": a2})
    for pt in sample:
        try:
            nabla_h, g, dg, _, _, _, grad, m = _eisenhart_pieces(
                params, pt, mode)
        except RigidHError:
            report.n_skipped += 1
            continue
        nabla_g = tc.covariant_derivative_sym2(m, g, pt, dT=dg)
        nabla_hp = a1 * nabla_h + a2 * nabla_g
        src = _sym_source(g, a1 * grad)
        E = nabla_hp - src
        scale = max(float(np.max(np.abs(nabla_hp))),
                    float(np.max(np.abs(src))),
                    float(np.max(np.abs(nabla_h))))
        abs_res = float(np.max(np.abs(E)))
        report.record(abs_res, _relative(abs_res, scale))
    return report


def projective_motion_residual(m, xi, a1, a2, pt, h=None, xi_jac=None):
    """(L_xi g)_ij - a1 h_ij - a2 g_ij for a candidate vector field.

    ``xi`` maps a point to an n-vector; its Jacobian comes from ``xi_jac``
    (layout [k, i] = d_i xi^k) or central finite differences. ``h`` defaults
    to zero for providers without a companion tensor.
    """
    pt = np.asarray(pt, dtype=float)
    g, dg, _ = m.metric_jets(pt)
    xv = np.asarray(xi(pt), dtype=float)
    jac = (np.asarray(xi_jac(pt), dtype=float) if xi_jac is not None
           else tc.fd_partials(xi, pt, shape=(m.n,)))
    lie = (np.einsum("k,ijk->ij", xv, dg)
           + np.einsum("kj,ki->ij", g, jac)
           + np.einsum("ik,kj->ij", g, jac))
    hv = np.zeros((m.n, m.n)) if h is None else np.asarray(h, dtype=float)
    res = lie - a1 * hv - a2 * g
    scale = max(float(np.max(np.abs(lie))), float(np.max(np.abs(a1 * hv))),
                float(np.max(np.abs(a2 * g))), float(np.max(np.abs(g))))
    abs_res = float(np.max(np.abs(res)))
    return res, abs_res, _relative(abs_res, scale)


def defining_function_gradient(m, xi, pt):
    """Gradient of div(xi)/(n+1), the defining function of a motion.

    div(xi) = d_k xi^k + Gamma^k_km xi^m; the gradient is taken by central
    finite differences of that scalar.
    """
    def divergence(p):
        jac = tc.fd_partials(xi, p, shape=(m.n,))
        gamma = tc.christoffel_at(m, p)
        return (np.trace(jac)
                + float(np.einsum("kkm,m->", gamma, np.asarray(xi(p)))))

    return tc.fd_partials(divergence, pt) / (m.n + 1)


def rho_values(params, pt) -> dict:
    """The rho invariants entering the constant-curvature criterion.

    Keys: rho_2, rho_4 (per double root), rho_24 (pair), and rho_{sigma}{p}
    for sigma in {5, 6}, p in {2, 4}. The inner root sum is multiplicity
    weighted: the double roots f2, f4 count twice.
    """
    roots = hs.roots_at(params, pt)
    g = hs.metric_at(params, pt)
    f = {2: roots.f2, 4: roots.f4, 5: roots.f5, 6: roots.f6}
    gdiag = {5: g[4, 4], 6: g[5, 5]}
    other = {5: 6, 6: 5}

    out = {}
    for p in (2, 4):
        out[f"rho_{p}"] = -0.25 * sum(
            f[s].d1 ** 2 / ((f[s].value - f[p].value) ** 2 * gdiag[s])
            for s in (5, 6))
    out["rho_24"] = -0.25 * sum(
        f[s].d1 ** 2 / ((f[s].value - f[2].value)
                        * (f[s].value - f[4].value) * gdiag[s])
        for s in (5, 6))
    for s in (5, 6):
        gam = other[s]
        # multiplicity-weighted sum over roots distinct from f_sigma
        msum = (2.0 / (f[2].value - f[s].value)
                + 2.0 / (f[4].value - f[s].value)
                + 1.0 / (f[gam].value - f[s].value))
        for p in (2, 4):
            dsp = f[s].value - f[p].value
            # expanded so that f'_sigma = 0 stays finite
            bracket = 2.0 * f[s].d2 + f[s].d1 ** 2 * (-1.0 / dsp + msum)
            lead = -0.25 * bracket / (dsp * gdiag[s])
            trail = -0.25 * (f[gam].d1 ** 2
                             / ((f[gam].value - f[p].value)
                                * (f[gam].value - f[s].value) * gdiag[gam]))
            out[f"rho_{s}{p}"] = lead + trail
    return out


def direct_curvature_verdict(m, sample, tol=DEFAULT_TOL) -> CurvatureVerdict:
    """Least-squares fit of R^i_jkl against K (d^i_k g_jl - d^i_l g_jk)."""
    ks, residuals = [], []
    eye = np.eye(m.n)
    for pt in sample:
        g = m.metric_jets(pt)[0]
        R = tc.riemann_at(m, pt)
        B = (np.einsum("ik,jl->ijkl", eye, g)
             - np.einsum("il,jk->ijkl", eye, g))
        denom = float(np.sum(B * B))
        K = float(np.sum(R * B)) / denom
        mis = R - K * B
        scale = max(float(np.max(np.abs(R))), float(np.max(np.abs(K * B))),
                    float(np.max(np.abs(g))))
        residuals.append(_relative(float(np.max(np.abs(mis))), scale))
        ks.append(K)
    ks = np.asarray(ks)
    K_mean = float(np.mean(ks))
    dispersion = float(np.max(np.abs(ks - K_mean))) if len(ks) else 0.0
    pointwise_ok = all(r <= tol for r in residuals)
    constant_ok = dispersion <= tol * max(1.0, abs(K_mean))
    return CurvatureVerdict(is_constant=pointwise_ok and constant_ok,
                            K=K_mean, K_dispersion=dispersion,
                            residuals=residuals)


def criterion_violation(params, pt) -> float:
    """Max relative violation of the rho equalities at one point."""
    rho = rho_values(params, pt)
    scale = max(1.0, max(abs(v) for v in rho.values()))
    worst = 0.0
    for p in (2, 4):
        for s in (5, 6):
            worst = max(worst, abs(rho[f"rho_{p}"] - rho[f"rho_{s}{p}"]))
        worst = max(worst, abs(rho[f"rho_{p}"] - rho["rho_24"]))
    return worst / scale


def constant_curvature_check(params, sample, tol=DEFAULT_TOL):
    """Both constant-curvature characterizations on one sample.

    Returns (direct verdict from the curvature tensor fit, criterion verdict
    from the rho equalities plus the integer conditions, details dict). The
    two verdicts are expected to agree; callers assert that.
    """
    m = hs.HSpaceMetric(params)
    direct = direct_curvature_verdict(m, sample, tol=tol)
    eps_ok = params.epsilon == 0 and params.epsilon_tilde == 0
    max_violation = max(criterion_violation(params, pt) for pt in sample)
    criterion_holds = eps_ok and max_violation <= tol
    details = {
        "epsilon_zero": eps_ok,
        "max_rho_violation": max_violation,
        "criterion_holds": criterion_holds,
    }
    return direct, criterion_holds, details
