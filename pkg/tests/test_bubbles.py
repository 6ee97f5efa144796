import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bn4d.bubbles import (
    BubbleParams,
    eval_bubble,
    eval_Ppsi_expansion,
    eval_psi,
    eval_PU_expansion,
    eval_U,
    exact_PU_ball,
    grad_bubble,
    grad_exact_PU_ball,
    grad_PU_expansion,
)
from bn4d.constants import FRAK_c, FRAK_C
from bn4d.domain import BallDomain, DomainError

from conftest import fd_laplacian

SQ2 = math.sqrt(2.0)
unit = BallDomain(1.0)
coord = st.floats(-2.0, 2.0, allow_nan=False)
point = st.tuples(coord, coord, coord, coord).map(np.array)
delta = st.floats(0.05, 2.0)


@pytest.mark.parametrize("x, expected", [
    ((0, 0, 0, 0), 2 * SQ2),
    ((1, 0, 0, 0), SQ2),
    ((0, 0, 3, 0), 2 * SQ2 / 10),
])
def test_U_values(x, expected):
    assert eval_U(np.array(x, float)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("d, xi, x, expected", [
    (1.0, (0, 0, 0, 0), (0, 0, 0, 0), 2 * SQ2),
    (0.1, (0, 0, 0, 0), (0, 0, 0, 0), 20 * SQ2),
    (0.5, (1, 0, 0, 0), (1, 0, 0, 1), 4 * SQ2 / 5),
])
def test_bubble_values(d, xi, x, expected):
    assert eval_bubble(BubbleParams(d, xi), np.array(x, float)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("j, x, expected", [
    (0, (0, 0, 0, 0), -2 * SQ2),
    (0, (0, 1, 0, 0), 0.0),
    (1, (1, 0, 0, 0), -SQ2),
])
def test_psi_values(j, x, expected):
    assert eval_psi(j, BubbleParams(1.0), np.array(x, float)) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("j", [-1, 5, 7])
def test_psi_bad_index(j):
    with pytest.raises(ValueError):
        eval_psi(j, BubbleParams(1.0), np.zeros(4))


def test_params_validation():
    with pytest.raises(ValueError):
        BubbleParams(0.0)
    with pytest.raises(ValueError):
        BubbleParams(0.1, (0.0, 0.0))


def test_pu_expansion_values():
    p = BubbleParams(0.01)
    assert eval_PU_expansion(p, np.zeros(4), unit) == pytest.approx(FRAK_c * (100 - 0.01), rel=1e-12)
    edge = np.array([1.0, 0, 0, 0])
    val = eval_PU_expansion(p, edge, unit)
    assert val == pytest.approx(FRAK_c * 0.01 / (1e-4 + 1) - FRAK_c * 0.01, rel=1e-12)
    assert val == pytest.approx(-FRAK_c * 1e-6, rel=1e-3)


def test_pu_expansion_outside_raises():
    with pytest.raises(DomainError):
        eval_PU_expansion(BubbleParams(0.1), np.array([1.1, 0, 0, 0]), unit)


def test_pu_far_field_is_green_function():
    d = 1e-3
    xi = np.array([0.2, 0.1, 0.0, 0.0])
    x = np.array([-0.3, 0.2, 0.4, 0.1])
    pu = eval_PU_expansion(BubbleParams(d, xi), x, unit)
    assert pu == pytest.approx(FRAK_C * d * unit.green(x, xi), rel=1e-5)


def test_exact_projection_values():
    p = BubbleParams(0.1)
    assert exact_PU_ball(p, 1.0, np.array([0, 0, 1.0, 0])) == pytest.approx(0.0, abs=1e-15)
    assert exact_PU_ball(p, 1.0, np.zeros(4)) == pytest.approx(FRAK_c * (10 - 0.1 / 1.01), rel=1e-14)
    assert exact_PU_ball(p, 1.0, np.zeros(4)) == pytest.approx(28.0043, abs=1e-4)


def test_exact_projection_requires_center():
    with pytest.raises(ValueError):
        exact_PU_ball(BubbleParams(0.1, (0.1, 0, 0, 0)), 1.0, np.zeros(4))
    with pytest.raises(ValueError):
        grad_exact_PU_ball(BubbleParams(0.1, (0.1, 0, 0, 0)), 1.0, np.zeros(4))


def test_exact_minus_expansion_is_cubic():
    R = 1.0
    prev = None
    for d in (0.1, 0.01, 0.001):
        p = BubbleParams(d)
        x = np.array([0.4, 0.1, 0.0, 0.2])
        gap = exact_PU_ball(p, R, x) - eval_PU_expansion(p, x, unit)
        assert gap == pytest.approx(FRAK_c * d**3 / (R * R * (d * d + R * R)), rel=1e-9)
        if prev is not None:
            assert gap / prev == pytest.approx(1e-3, rel=2e-2)
        prev = gap


@given(point, delta)
def test_bubble_scaling(x, d):
    p = BubbleParams(d)
    assert eval_bubble(p, x) == pytest.approx(eval_U(x / d) / d, rel=1e-12)


@given(point, delta)
def test_bubble_radial_and_positive(x, d):
    p = BubbleParams(d)
    rot = np.array([x[1], -x[0], x[3], x[2]])
    assert eval_bubble(p, x) > 0
    assert eval_bubble(p, x) == pytest.approx(eval_bubble(p, rot), rel=1e-13)


@given(point, delta)
def test_kernel_parity(x, d):
    p = BubbleParams(d)
    assert eval_psi(0, p, -x) == pytest.approx(eval_psi(0, p, x), rel=1e-12, abs=1e-12)
    for j in range(1, 5):
        assert eval_psi(j, p, -x) == pytest.approx(-eval_psi(j, p, x), rel=1e-12, abs=1e-12)


@given(point, delta)
def test_kernels_are_bubble_derivatives(x, d):
    # psi^0 = delta dU/d delta and psi^j = -delta dU/d xi_j in the rescaled normalisation
    xi = np.zeros(4)
    h = 1e-6 * d
    dU_dd = (eval_bubble(BubbleParams(d + h, xi), x) - eval_bubble(BubbleParams(d - h, xi), x)) / (2 * h)
    assert eval_psi(0, BubbleParams(d), x) == pytest.approx(d * dU_dd, rel=1e-5, abs=1e-6)
    g = grad_bubble(BubbleParams(d), x)
    for j in range(1, 5):
        # d/d xi_j = - d/d x_j
        assert eval_psi(j, BubbleParams(d), x) == pytest.approx(d * g[j - 1], rel=1e-10, abs=1e-12)


def test_gradient_matches_fd(rng):
    p = BubbleParams(0.3, (0.1, 0.0, -0.1, 0.2))
    for _ in range(5):
        x = rng.uniform(-0.6, 0.6, 4)
        h = 1e-6
        fd = [(eval_bubble(p, x + h * e) - eval_bubble(p, x - h * e)) / (2 * h) for e in np.eye(4)]
        np.testing.assert_allclose(grad_bubble(p, x), fd, rtol=1e-7)
        fd = [(eval_PU_expansion(p, x + h * e, unit) - eval_PU_expansion(p, x - h * e, unit)) / (2 * h)
              for e in np.eye(4)]
        np.testing.assert_allclose(grad_PU_expansion(p, x, unit), fd, rtol=1e-6)


def test_bubble_solves_critical_equation(rng):
    for _ in range(5):
        x = rng.uniform(-1, 1, 4)
        lap = fd_laplacian(eval_U, x, 1e-3)
        assert -lap == pytest.approx(eval_U(x) ** 3, rel=1e-5)


def test_kernels_solve_linearised_equation(rng):
    p = BubbleParams(1.0)
    for j in range(5):
        x = rng.uniform(-1, 1, 4)
        f = lambda y: eval_psi(j, p, y)
        lap = fd_laplacian(f, x, 1e-3)
        assert -lap == pytest.approx(3 * eval_U(x) ** 2 * f(x), rel=1e-4, abs=1e-6)


def test_projected_kernels_nearly_vanish_on_boundary():
    d = 1e-2
    p = BubbleParams(d, (0.2, 0.0, 0.1, 0.0))
    dirs = np.array([[1, 0, 0, 0], [0, -1, 0, 0], [0.6, 0.8, 0, 0], [0, 0, 0, 1.0]])
    for j in range(5):
        raw = eval_psi(j, p, dirs)
        proj = eval_Ppsi_expansion(j, p, dirs, unit)
        assert np.max(np.abs(proj)) < 1e-2 * np.max(np.abs(raw))
