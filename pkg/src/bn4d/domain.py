"""Domains, Green/Robin data and potentials.

Points are arrays whose last axis has length 4; every evaluator broadcasts
over the leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .constants import OMEGA

__all__ = [
    "DomainError",
    "BallDomain",
    "CustomDomain",
    "Potential",
    "ConstantPotential",
    "QuadraticPotential",
    "GaussianBumps",
    "green_ball",
    "robin_tau_ball",
    "grad_hess_tau",
    "fd_gradient",
    "fd_hessian",
]


class DomainError(ValueError):
    """A point lies outside the domain or too close to its boundary."""


def _as_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 4:
        raise ValueError(f"points must have a trailing axis of length 4, got {x.shape}")
    return x


def fd_gradient(fun: Callable, x, h: float) -> np.ndarray:
    """Fourth-order central-difference gradient of a scalar function at one point."""
    x = np.asarray(x, dtype=float)
    g = np.empty(4)
    for i in range(4):
        e = np.zeros(4)
        e[i] = h
        g[i] = (-fun(x + 2 * e) + 8 * fun(x + e) - 8 * fun(x - e) + fun(x - 2 * e)) / (12 * h)
    return g


def fd_hessian(fun: Callable, x, h: float) -> np.ndarray:
    """Central-difference Hessian: 5-point stencil on the diagonal, 4-point cross terms."""
    x = np.asarray(x, dtype=float)
    f0 = fun(x)
    hess = np.empty((4, 4))
    eye = np.eye(4) * h
    for i in range(4):
        ei = eye[i]
        hess[i, i] = (
            -fun(x + 2 * ei) + 16 * fun(x + ei) - 30 * f0 + 16 * fun(x - ei) - fun(x - 2 * ei)
        ) / (12 * h * h)
        for j in range(i + 1, 4):
            ej = eye[j]
            val = (
                fun(x + ei + ej) - fun(x + ei - ej) - fun(x - ei + ej) + fun(x - ei - ej)
            ) / (4 * h * h)
            hess[i, j] = hess[j, i] = val
    return hess


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


class _DomainBase:
    rho: float

    def fundamental(self, x, y):
        """Newtonian kernel 1/(2 omega |x-y|^2)."""
        d = _as_points(x) - _as_points(y)
        return 1.0 / (2.0 * OMEGA * np.sum(d * d, axis=-1))

    def green(self, x, y):
        x = _as_points(x)
        y = _as_points(y)
        self._check_inside(x)
        self._check_inside(y)
        d2 = np.sum((x - y) ** 2, axis=-1)
        if np.any(d2 == 0.0):
            raise DomainError("Green function evaluated at its pole x == y")
        return 1.0 / (2.0 * OMEGA * d2) - self.regular_part(x, y)

    def check_margin(self, x, rho: Optional[float] = None):
        """Raise if ``x`` is closer than ``rho`` to the boundary."""
        rho = self.rho if rho is None else rho
        dist = self.boundary_distance(x)
        if np.any(dist < rho):
            raise DomainError(
                f"point at distance {np.min(dist):.3g} from the boundary; margin is {rho:.3g}"
            )

    def _check_inside(self, x):
        if np.any(self.boundary_distance(x) < -1e-12 * self.scale):
            raise DomainError("point outside the domain")


@dataclass(frozen=True)
class BallDomain(_DomainBase):
    """The ball B(center, radius) with closed-form potential theory.

    The regular part comes from the method of images,
    ``H(x, y) = 1 / (2 omega (R^2 - 2 x.y + |x|^2 |y|^2 / R^2))`` with ``x, y``
    measured from the center; it has no singularity at ``y = center``.
    """

    radius: float = 1.0
    center: tuple = (0.0, 0.0, 0.0, 0.0)
    margin: Optional[float] = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) != 4:
            raise ValueError("center must have 4 coordinates")

    @property
    def kind(self) -> str:
        return "ball"

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def scale(self) -> float:
        return self.radius

    @property
    def rho(self) -> float:
        return 0.1 * self.diameter if self.margin is None else self.margin

    def _rel(self, x) -> np.ndarray:
        return _as_points(x) - np.asarray(self.center)

    def boundary_distance(self, x):
        return self.radius - np.linalg.norm(self._rel(x), axis=-1)

    def contains(self, x):
        return self.boundary_distance(x) > 0.0

    def _image_denominator(self, x, y):
        xr, yr = self._rel(x), self._rel(y)
        R2 = self.radius**2
        return (
            R2
            - 2.0 * np.sum(xr * yr, axis=-1)
            + np.sum(xr * xr, axis=-1) * np.sum(yr * yr, axis=-1) / R2
        )

    def regular_part(self, x, y):
        return 1.0 / (2.0 * OMEGA * self._image_denominator(x, y))

    def grad_regular_part(self, x, y):
        """Gradient of H(x, y) with respect to its first argument."""
        xr, yr = self._rel(x), self._rel(y)
        R2 = self.radius**2
        D = self._image_denominator(x, y)
        dD = -2.0 * yr + 2.0 * xr * np.sum(yr * yr, axis=-1, keepdims=True) / R2
        return -dD / (2.0 * OMEGA * D[..., None] ** 2)

    def tau(self, x):
        xr = self._rel(x)
        R2 = self.radius**2
        s = np.sum(xr * xr, axis=-1)
        return R2 / (2.0 * OMEGA * (R2 - s) ** 2)

    def grad_tau(self, x):
        xr = self._rel(x)
        R2 = self.radius**2
        s = np.sum(xr * xr, axis=-1, keepdims=True)
        return 2.0 * R2 * xr / (OMEGA * (R2 - s) ** 3)

    def hess_tau(self, x):
        xr = self._rel(x)
        R2 = self.radius**2
        s = np.sum(xr * xr, axis=-1)[..., None, None]
        outer = xr[..., :, None] * xr[..., None, :]
        return 2.0 * R2 / OMEGA * (np.eye(4) / (R2 - s) ** 3 + 6.0 * outer / (R2 - s) ** 4)

    def ray_exit(self, x, directions):
        """Distance from interior point ``x`` to the sphere along unit ``directions``."""
        xr = self._rel(x)
        directions = _as_points(directions)
        b = directions @ xr
        c = xr @ xr - self.radius**2
        return -b + np.sqrt(b * b - c)

    def describe(self) -> dict:
        return {"kind": "ball", "radius": self.radius, "center": list(self.center), "rho": self.rho}


@dataclass(frozen=True)
class CustomDomain(_DomainBase):
    """A domain defined by user-supplied potential-theoretic evaluators.

    ``regular_part(x, y)`` and ``boundary_distance(x)`` are required.
    ``tau`` defaults to the diagonal of ``regular_part``; its derivatives are
    taken by central differences at step ``1e-4 * scale``. ``ray_exit`` is
    only needed by the quadrature checks that integrate over the whole domain.
    """

    regular_part_fn: Callable
    boundary_distance_fn: Callable
    scale: float = 1.0
    tau_fn: Optional[Callable] = None
    ray_exit_fn: Optional[Callable] = None
    margin: Optional[float] = None
    diameter: float = 2.0
    name: str = "custom"

    @property
    def kind(self) -> str:
        return "custom"

    @property
    def rho(self) -> float:
        return 0.1 * self.diameter if self.margin is None else self.margin

    def boundary_distance(self, x):
        x = _as_points(x)
        if x.ndim == 1:
            return float(self.boundary_distance_fn(x))
        return np.array([self.boundary_distance_fn(p) for p in x.reshape(-1, 4)]).reshape(
            x.shape[:-1]
        )

    def contains(self, x):
        return self.boundary_distance(x) > 0.0

    def regular_part(self, x, y):
        x, y = np.broadcast_arrays(_as_points(x), _as_points(y))
        if x.ndim == 1:
            return float(self.regular_part_fn(x, y))
        out = [self.regular_part_fn(a, b) for a, b in zip(x.reshape(-1, 4), y.reshape(-1, 4))]
        return np.array(out).reshape(x.shape[:-1])

    def grad_regular_part(self, x, y):
        x, y = np.broadcast_arrays(_as_points(x), _as_points(y))
        h = 1e-4 * self.scale
        flat = [fd_gradient(lambda z: self.regular_part_fn(z, b), a, h)
                for a, b in zip(x.reshape(-1, 4), y.reshape(-1, 4))]
        return np.array(flat).reshape(x.shape)

    def _tau_scalar(self, x):
        if self.tau_fn is not None:
            return float(self.tau_fn(x))
        return float(self.regular_part_fn(x, x))

    def tau(self, x):
        x = _as_points(x)
        if x.ndim == 1:
            return self._tau_scalar(x)
        return np.array([self._tau_scalar(p) for p in x.reshape(-1, 4)]).reshape(x.shape[:-1])

    def grad_tau(self, x):
        x = _as_points(x)
        h = 1e-4 * self.scale
        flat = [fd_gradient(self._tau_scalar, p, h) for p in x.reshape(-1, 4)]
        return np.array(flat).reshape(x.shape)

    def hess_tau(self, x):
        x = _as_points(x)
        h = 1e-4 * self.scale
        flat = [fd_hessian(self._tau_scalar, p, h) for p in x.reshape(-1, 4)]
        return np.array(flat).reshape(x.shape + (4,))

    def ray_exit(self, x, directions):
        if self.ray_exit_fn is None:
            raise NotImplementedError(f"domain {self.name!r} provides no ray_exit evaluator")
        return np.asarray(self.ray_exit_fn(_as_points(x), _as_points(directions)), dtype=float)

    def describe(self) -> dict:
        return {"kind": "custom", "name": self.name, "scale": self.scale, "rho": self.rho}


def green_ball(R: float, x, y):
    """Green function of the Dirichlet Laplacian on the ball of radius ``R`` centered at 0."""
    return BallDomain(radius=R).green(x, y)


def robin_tau_ball(R: float, x):
    """Robin function ``R^2 / (2 omega (R^2 - |x|^2)^2)`` of the ball centered at 0."""
    dom = BallDomain(radius=R)
    dom._check_inside(_as_points(x))
    return dom.tau(x)


def grad_hess_tau(domain, x):
    """Gradient and Hessian of the Robin function at an interior point.

    Raises :class:`DomainError` when ``x`` is within the safety margin of the
    boundary.
    """
    x = _as_points(x)
    domain.check_margin(x)
    return domain.grad_tau(x), domain.hess_tau(x)


# ---------------------------------------------------------------------------
# Potentials
# ---------------------------------------------------------------------------


class Potential:
    """Base class: subclasses provide ``value``, ``grad`` and ``hess``."""

    def __call__(self, x):
        return self.value(x)

    def describe(self) -> dict:  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantPotential(Potential):
    v0: float = 1.0

    def value(self, x):
        x = _as_points(x)
        return np.full(x.shape[:-1], float(self.v0))[()]

    def grad(self, x):
        return np.zeros_like(_as_points(x))

    def hess(self, x):
        x = _as_points(x)
        return np.zeros(x.shape + (4,))

    def scaled(self, lam: float) -> "ConstantPotential":
        return ConstantPotential(lam * self.v0)

    def describe(self) -> dict:
        return {"form": "constant", "v0": self.v0}


@dataclass(frozen=True)
class QuadraticPotential(Potential):
    """``V(x) = c0 + g.x + x.A.x / 2`` with symmetric ``A``."""

    c0: float
    g: Sequence[float] = (0.0, 0.0, 0.0, 0.0)
    A: Sequence[Sequence[float]] = field(default_factory=lambda: np.zeros((4, 4)))

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float).reshape(4)
        A = np.asarray(self.A, dtype=float).reshape(4, 4)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "A", 0.5 * (A + A.T))

    def value(self, x):
        x = _as_points(x)
        return self.c0 + x @ self.g + 0.5 * np.einsum("...i,ij,...j->...", x, self.A, x)

    def grad(self, x):
        x = _as_points(x)
        return self.g + x @ self.A

    def hess(self, x):
        x = _as_points(x)
        return np.broadcast_to(self.A, x.shape + (4,)).copy()

    def scaled(self, lam: float) -> "QuadraticPotential":
        return QuadraticPotential(lam * self.c0, lam * self.g, lam * self.A)

    def describe(self) -> dict:
        return {"form": "quadratic", "c0": self.c0, "g": self.g.tolist(), "A": self.A.tolist()}


@dataclass(frozen=True)
class GaussianBumps(Potential):
    """``V(x) = offset + sum_k a_k exp(-|x - p_k|^2 / (2 w_k^2))``."""

    bumps: Sequence[tuple]
    offset: float = 0.0

    def __post_init__(self):
        clean = []
        for amp, center, width in self.bumps:
            center = tuple(float(c) for c in center)
            if len(center) != 4 or not width > 0:
                raise ValueError("each bump needs a 4D center and a positive width")
            clean.append((float(amp), center, float(width)))
        object.__setattr__(self, "bumps", tuple(clean))

    def _terms(self, x):
        x = _as_points(x)
        for amp, center, width in self.bumps:
            d = x - np.asarray(center)
            e = amp * np.exp(-np.sum(d * d, axis=-1) / (2 * width**2))
            yield d, e, width

    def value(self, x):
        x = _as_points(x)
        out = np.full(x.shape[:-1], self.offset)
        for _, e, _w in self._terms(x):
            out = out + e
        return out[()]

    def grad(self, x):
        x = _as_points(x)
        out = np.zeros(x.shape)
        for d, e, w in self._terms(x):
            out = out - d * (e / w**2)[..., None]
        return out

    def hess(self, x):
        x = _as_points(x)
        out = np.zeros(x.shape + (4,))
        for d, e, w in self._terms(x):
            outer = d[..., :, None] * d[..., None, :] / w**4
            out = out + e[..., None, None] * (outer - np.eye(4) / w**2)
        return out

    def scaled(self, lam: float) -> "GaussianBumps":
        return GaussianBumps([(lam * a, c, w) for a, c, w in self.bumps], lam * self.offset)

    def describe(self) -> dict:
        return {
            "form": "gaussian_bumps",
            "offset": self.offset,
            "bumps": [{"amplitude": a, "center": list(c), "width": w} for a, c, w in self.bumps],
        }
