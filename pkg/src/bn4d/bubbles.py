"""Standard bubble, kernel functions and their projections.

All evaluators broadcast over leading axes of ``x`` (last axis = 4).
Kernel indices follow the usual convention: ``j = 0`` is the dilation mode,
``j = 1..4`` the translation modes along coordinate ``j - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import FRAK_c, FRAK_C
from .domain import DomainError

__all__ = [
    "BubbleParams",
    "eval_U",
    "grad_U",
    "eval_bubble",
    "grad_bubble",
    "eval_psi",
    "eval_PU_expansion",
    "grad_PU_expansion",
    "eval_Ppsi_expansion",
    "exact_PU_ball",
    "grad_exact_PU_ball",
]


@dataclass(frozen=True)
class BubbleParams:
    """Concentration rate ``delta`` and concentration point ``xi``."""

    delta: float
    xi: tuple = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        xi = tuple(float(c) for c in np.asarray(self.xi, dtype=float).reshape(-1))
        if len(xi) != 4:
            raise ValueError("xi must have 4 coordinates")
        object.__setattr__(self, "xi", xi)

    @property
    def xi_array(self) -> np.ndarray:
        return np.asarray(self.xi)

    def check_domain(self, domain, rho=None):
        domain.check_margin(self.xi_array, rho)


def _r2(x, center=None):
    x = np.asarray(x, dtype=float)
    if center is not None:
        x = x - np.asarray(center, dtype=float)
    return np.sum(x * x, axis=-1)


def eval_U(x):
    """``frak_c / (1 + |x|^2)``."""
    return FRAK_c / (1.0 + _r2(x))


def grad_U(x):
    x = np.asarray(x, dtype=float)
    return -2.0 * FRAK_c * x / ((1.0 + _r2(x)) ** 2)[..., None]


def eval_bubble(p: BubbleParams, x):
    """``U_{delta,xi}(x) = U((x - xi)/delta) / delta``, written as ``c delta / (delta^2 + r^2)``."""
    d = p.delta
    return FRAK_c * d / (d * d + _r2(x, p.xi))


def grad_bubble(p: BubbleParams, x):
    d = p.delta
    y = np.asarray(x, dtype=float) - p.xi_array
    return -2.0 * FRAK_c * d * y / ((d * d + _r2(y)) ** 2)[..., None]


def eval_psi(j: int, p: BubbleParams, x):
    """Rescaled kernel ``psi^j((x - xi)/delta) / delta``.

    ``psi^0(y) = -c (1 - |y|^2) / (1 + |y|^2)^2`` and
    ``psi^j(y) = -2 c y_j / (1 + |y|^2)^2``.
    """
    if j not in (0, 1, 2, 3, 4):
        raise ValueError(f"kernel index must be in 0..4, got {j}")
    d = p.delta
    y = np.asarray(x, dtype=float) - p.xi_array
    r2 = _r2(y)
    den = (d * d + r2) ** 2
    if j == 0:
        return FRAK_c * d * (r2 - d * d) / den
    return -2.0 * FRAK_c * d * d * y[..., j - 1] / den


def _require_inside(domain, x):
    if np.any(domain.boundary_distance(x) < -1e-12 * domain.scale):
        raise DomainError("projection evaluated outside the domain")


def eval_PU_expansion(p: BubbleParams, x, domain):
    """First-order projected bubble ``U_{delta,xi} - frak_C delta H(x, xi)``."""
    _require_inside(domain, x)
    return eval_bubble(p, x) - FRAK_C * p.delta * domain.regular_part(x, p.xi_array)


def grad_PU_expansion(p: BubbleParams, x, domain):
    return grad_bubble(p, x) - FRAK_C * p.delta * domain.grad_regular_part(x, p.xi_array)


def eval_Ppsi_expansion(j: int, p: BubbleParams, x, domain):
    """Leading-order projections of the kernel functions.

    ``j = 0``: ``psi^0 - delta frak_C H(x, xi)`` (valid away from ``xi``);
    ``j >= 1``: ``psi^j + delta^2 frak_C d_{xi_j} H(x, xi)``, using the
    symmetry of H to take the derivative in the first slot. The sign is the
    one that makes the boundary trace vanish to leading order: the kernel
    decays like ``-frak_C delta^2 d_{xi_j}(1/(2 omega |x - xi|^2))``.
    """
    _require_inside(domain, x)
    psi = eval_psi(j, p, x)
    if j == 0:
        return psi - p.delta * FRAK_C * domain.regular_part(x, p.xi_array)
    x = np.asarray(x, dtype=float)
    xi = np.broadcast_to(p.xi_array, x.shape)
    dH = domain.grad_regular_part(xi, x)[..., j - 1]
    return psi + p.delta**2 * FRAK_C * dH


def _check_centered(p: BubbleParams, R: float, center):
    center = np.zeros(4) if center is None else np.asarray(center, dtype=float)
    if not np.allclose(p.xi_array, center, rtol=0.0, atol=1e-14 * max(R, 1.0)):
        raise ValueError("exact projection is only available for a bubble at the ball center")
    return center


def exact_PU_ball(p: BubbleParams, R: float, x, center=None):
    """Exact projection of a centered bubble onto the ball: ``U_delta - c delta/(delta^2 + R^2)``."""
    _check_centered(p, R, center)
    d = p.delta
    return eval_bubble(p, x) - FRAK_c * d / (d * d + R * R)


def grad_exact_PU_ball(p: BubbleParams, R: float, x, center=None):
    _check_centered(p, R, center)
    return grad_bubble(p, x)
