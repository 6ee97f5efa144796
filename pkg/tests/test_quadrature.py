import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bn4d.constants import OMEGA
from bn4d.domain import BallDomain
from bn4d.quadrature import (
    QuadratureSpec,
    Region,
    hopf_directions,
    integrate,
    integrate_sphere,
    integrate_whole_space_radial,
    sphere_rule,
)

PI2 = math.pi**2


def test_sphere_rule_moments():
    dirs, w = sphere_rule(16, 12, 16)
    assert w.sum() == pytest.approx(OMEGA, rel=1e-14)
    np.testing.assert_allclose(np.linalg.norm(dirs, axis=1), 1.0, rtol=1e-14)
    # int x_i^2 = omega / 4 and int x_i^4 = omega / 8 on S^3
    for i in range(4):
        assert w @ dirs[:, i] ** 2 == pytest.approx(OMEGA / 4, rel=1e-12)
        assert w @ dirs[:, i] ** 4 == pytest.approx(OMEGA / 8, rel=1e-12)
        assert abs(w @ dirs[:, i]) < 1e-13
    assert abs(w @ (dirs[:, 0] * dirs[:, 1])) < 1e-13


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="spline")
    with pytest.raises(ValueError):
        QuadratureSpec(n_radial=8)
    with pytest.raises(ValueError):
        QuadratureSpec(n_phi=15)
    d = QuadratureSpec().doubled()
    assert (d.n_radial, d.n_chi, d.n_points) == (48, 32, 2**17)


def test_hopf_directions_unit(rng):
    dirs = hopf_directions(rng.random((1000, 3)))
    np.testing.assert_allclose(np.linalg.norm(dirs, axis=1), 1.0, rtol=1e-14)
    # uniform on S^3: second moment of each coordinate is 1/4
    assert np.mean(dirs[:, 2] ** 2) == pytest.approx(0.25, abs=0.02)


@pytest.mark.parametrize("scheme", ["tensor", "qmc"])
def test_ball_volume_and_moment(scheme):
    spec = QuadratureSpec(scheme=scheme)
    reg = Region.ball((0.1, 0.0, -0.2, 0.0), 1.5)
    tol = 1e-12 if scheme == "tensor" else 1e-3
    vol = integrate(lambda p: np.ones(len(p)), reg, spec)
    assert vol == pytest.approx(0.5 * PI2 * 1.5**4, rel=tol)
    c = np.array(reg.center)
    m2 = integrate(lambda p: np.sum((p - c) ** 2, axis=1), reg, spec)
    assert m2 == pytest.approx(OMEGA * 1.5**6 / 6, rel=tol)


def test_radial_scheme_matches_tensor_for_radial_integrand():
    reg = Region.shell(np.zeros(4), 0.2, 1.0)
    f = lambda p: 1.0 / (1e-4 + np.sum(p * p, axis=1)) ** 2
    a = integrate(f, reg, QuadratureSpec(scheme="radial"), scale=0.01)
    b = integrate(f, reg, QuadratureSpec(), scale=0.01)
    assert a == pytest.approx(b, rel=1e-12)


def test_peaked_integrand_resolved():
    d = 1e-3
    f = lambda p: (d / (d * d + np.sum(p * p, axis=1))) ** 4
    val = integrate(f, Region.ball(np.zeros(4), 1.0), QuadratureSpec(), scale=d)
    # x = d s turns this into omega int_0^{1/d} s^3 / (1 + s^2)^4 ds
    L = 1.0 / d
    inner = (1.0 / 12) - (3 * L**2 + 1) / (12 * (1 + L**2) ** 3)
    assert val == pytest.approx(OMEGA * inner, rel=1e-12)


def test_domain_region_uses_ray_exit():
    dom = BallDomain(1.0)
    xi = np.array([0.4, 0.0, 0.1, 0.0])
    vol = integrate(lambda p: np.ones(len(p)), Region.domain(dom, xi), QuadratureSpec(n_chi=24, n_theta=16,
                                                                                    n_phi=24))
    assert vol == pytest.approx(0.5 * PI2, rel=1e-4)


def test_sphere_surface():
    area = integrate_sphere(lambda p, n: np.ones(len(p)), np.zeros(4), 0.7)
    assert area == pytest.approx(OMEGA * 0.7**3, rel=1e-14)
    flux = integrate_sphere(lambda p, n: np.sum(p * n, axis=1), np.ones(4), 0.7)
    # div x = 4, so the flux of x equals 4 |B|
    assert flux == pytest.approx(4 * 0.5 * PI2 * 0.7**4, rel=1e-13)


def test_whole_space_radial():
    val = integrate_whole_space_radial(lambda r: 1.0 / (1 + r * r) ** 4)
    assert val == pytest.approx(OMEGA / 12, rel=1e-14)


@given(st.integers(0, 2**16))
def test_qmc_reproducible(seed):
    spec = QuadratureSpec(scheme="qmc", n_points=2**8, seed=seed)
    f = lambda p: np.exp(-np.sum(p * p, axis=1))
    reg = Region.ball(np.zeros(4), 1.0)
    assert integrate(f, reg, spec) == integrate(f, reg, spec)
