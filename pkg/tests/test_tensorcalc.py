"""Christoffel symbols, curvature and signature on known geometries."""
import numpy as np
import pytest

from conftest import R1_RANGES, make_r1

from rigidh.errors import DegenerateMetric
from rigidh.hspace2211 import HSpaceMetric, metric_at
from rigidh import tensorcalc as tc
from rigidh.verify import sample_points


@pytest.fixture(scope="module")
def r1_metric():
    return HSpaceMetric(make_r1())


@pytest.fixture(scope="module")
def sphere():
    return tc.Sphere2Metric()


def test_flat_christoffel_zero():
    m = tc.ConstantMetric(np.diag([1.0, -1.0, 2.0]))
    pt = np.array([0.3, -0.7, 1.1])
    gamma = tc.christoffel_at(m, pt)
    assert np.all(gamma == 0.0)
    assert np.all(tc.riemann_at(m, pt) == 0.0)


def test_sphere_christoffel_values(sphere):
    # closed forms: G^theta_phiphi = -sin cos, G^phi_thetaphi = cot
    th = np.pi / 4
    pt = np.array([th, 0.3])
    gamma = tc.christoffel_at(sphere, pt)
    assert gamma[0, 1, 1] == pytest.approx(-0.5, rel=1e-12)
    assert gamma[1, 0, 1] == pytest.approx(1.0, rel=1e-12)
    assert gamma[1, 1, 0] == pytest.approx(1.0, rel=1e-12)
    assert gamma[0, 0, 0] == 0.0


def test_sphere_unit_curvature(sphere):
    rng = np.random.default_rng(9)
    for _ in range(10):
        pt = np.array([rng.uniform(0.4, np.pi - 0.4), rng.uniform(0, 2 * np.pi)])
        R = tc.riemann_at(sphere, pt)
        g = sphere.metric(pt)
        expected = (np.einsum("ik,jl->ijkl", np.eye(2), g)
                    - np.einsum("il,jk->ijkl", np.eye(2), g))
        assert np.max(np.abs(R - expected)) <= 1e-9 * max(1.0, np.max(np.abs(R)))


def test_riemann_antisymmetry_and_first_bianchi(r1_metric):
    pts, _ = sample_points(r1_metric.params, R1_RANGES, 5, seed=31)
    for pt in pts:
        R = tc.riemann_at(r1_metric, pt)
        scale = max(1.0, np.max(np.abs(R)))
        assert np.max(np.abs(R + np.einsum("ijlk->ijkl", R))) <= 1e-9 * scale
        bianchi = (R + np.einsum("iklj->ijkl", R) + np.einsum("iljk->ijkl", R))
        assert np.max(np.abs(bianchi)) <= 1e-9 * scale
        # lowered tensor is symmetric under pair swap
        g = r1_metric.metric(pt)
        Rlow = np.einsum("im,mjkl->ijkl", g, R)
        assert np.max(np.abs(Rlow - np.einsum("klij->ijkl", Rlow))) <= 1e-9 * max(
            1.0, np.max(np.abs(Rlow)))


def test_metric_compatibility(r1_metric):
    pts, _ = sample_points(r1_metric.params, R1_RANGES, 5, seed=32)
    for pt in pts:
        g, dg = r1_metric.metric_jets1(pt)
        nabla_g = tc.covariant_derivative_sym2(r1_metric, g, pt, dT=dg)
        assert np.max(np.abs(nabla_g)) <= 1e-10 * max(1.0, np.max(np.abs(dg)))


def test_christoffel_derivatives_match_fd(r1_metric):
    pts, _ = sample_points(r1_metric.params, R1_RANGES, 3, seed=33)
    for pt in pts:
        gamma, dgamma = tc.christoffel_at(r1_metric, pt, with_derivatives=True)
        dg_fd = tc.fd_partials(lambda p: tc.christoffel_at(r1_metric, p), pt,
                               shape=(6, 6, 6))
        scale = max(1.0, np.max(np.abs(dgamma)))
        assert np.max(np.abs(dgamma - dg_fd)) / scale < 1e-5


def test_fd_provider_agrees_with_analytic(r1_metric):
    params = r1_metric.params
    fd = tc.FiniteDifferenceMetric(lambda p: metric_at(params, p), 6)
    pts, _ = sample_points(params, R1_RANGES, 3, seed=34)
    for pt in pts:
        ga, dga, d2ga = r1_metric.metric_jets(pt)
        gf, dgf, d2gf = fd.metric_jets(pt)
        assert np.array_equal(ga, gf)
        assert np.max(np.abs(dga - dgf)) <= 1e-6 * max(1.0, np.max(np.abs(dga)))
        assert np.max(np.abs(d2ga - d2gf)) <= 1e-5 * max(1.0, np.max(np.abs(d2ga)))


def test_signature_counts():
    m = tc.ConstantMetric(np.diag([2.0, 1.0, -3.0, -1.0, -0.5, 4.0]))
    assert tc.signature_at(m, np.zeros(6)) == (3, 3)
    lorentz = tc.ConstantMetric(np.diag([-1.0, 1.0, 1.0, 1.0]))
    assert tc.signature_at(lorentz, np.zeros(4)) == (3, 1)


def test_signature_rejects_near_degenerate():
    m = tc.ConstantMetric(np.diag([1.0, 1e-14]))
    with pytest.raises(DegenerateMetric):
        tc.signature_at(m, np.zeros(2))


def test_fd_partials_quadratic():
    f = lambda p: np.array([p[0] ** 2 + p[1], p[0] * p[1]])
    pt = np.array([1.5, -0.5])
    d = tc.fd_partials(f, pt, shape=(2,))
    expected = np.array([[3.0, 1.0], [-0.5, 1.5]])
    assert np.max(np.abs(d - expected)) < 1e-8

    d2 = tc.fd_second_partials(f, pt, shape=(2,))
    expected2 = np.array([[[2.0, 0.0], [0.0, 0.0]],
                          [[0.0, 1.0], [1.0, 0.0]]])
    assert np.max(np.abs(d2 - expected2)) < 1e-6
