"""Quadrature rules on R^4 in polar coordinates about a center.

Integrands of the checks peak at scale ``delta`` around the concentration
point, so the radial variable is split at ``r = delta``: Gauss-Legendre in
``r`` on ``[0, delta]`` and composite Gauss-Legendre in ``ln r`` beyond.
Directions come from a product rule on S^3 in hyperspherical angles, which
is symmetric under every coordinate reflection, so odd integrands cancel to
rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy.stats import qmc

from .constants import OMEGA

__all__ = [
    "QuadratureSpec",
    "Region",
    "sphere_rule",
    "hopf_directions",
    "integrate",
    "integrate_sphere",
    "integrate_whole_space_radial",
]

SCHEMES = ("tensor", "radial", "qmc")


@dataclass(frozen=True)
class QuadratureSpec:
    """Scheme and resolution of a quadrature.

    ``tensor``: radial Gauss nodes x product sphere rule;
    ``radial``: radial Gauss nodes along one axis with weight omega, only
    valid for integrands radial about the center;
    ``qmc``: scrambled Sobol points, reproducible through ``seed``.
    """

    scheme: str = "tensor"
    n_radial: int = 24
    n_chi: int = 16
    n_theta: int = 12
    n_phi: int = 16
    panel_width: float = 1.0
    n_points: int = 2**16
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if self.n_radial < 16:
            raise ValueError("n_radial must be at least 16")
        if self.n_phi % 2:
            raise ValueError("n_phi must be even to keep the rule reflection-symmetric")

    def doubled(self) -> "QuadratureSpec":
        from dataclasses import replace

        return replace(self, n_radial=2 * self.n_radial, n_chi=2 * self.n_chi,
                       n_theta=2 * self.n_theta, n_phi=2 * self.n_phi,
                       n_points=2 * self.n_points)


@dataclass(frozen=True)
class Region:
    """Integration region in polar coordinates about ``center``.

    ``outer`` is either a radius or a callable mapping unit directions to
    the exit distance (for whole domains seen from an interior point).
    """

    center: tuple
    outer: Union[float, Callable]
    inner: float = 0.0

    @classmethod
    def ball(cls, center, radius):
        return cls(tuple(np.asarray(center, dtype=float)), float(radius))

    @classmethod
    def shell(cls, center, r_inner, r_outer):
        return cls(tuple(np.asarray(center, dtype=float)), float(r_outer), float(r_inner))

    @classmethod
    def domain(cls, domain, center):
        center = np.asarray(center, dtype=float)
        return cls(tuple(center), lambda dirs: domain.ray_exit(center, dirs))

    def extent(self, dirs):
        if callable(self.outer):
            return np.asarray(self.outer(dirs), dtype=float)
        return np.full(dirs.shape[0], float(self.outer))


@lru_cache(maxsize=32)
def _gauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _gauss01(n: int):
    x, w = _gauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=32)
def sphere_rule(n_chi: int, n_theta: int, n_phi: int):
    """Product rule on S^3; weights sum to omega = 2 pi^2.

    Directions are ``(cos chi, sin chi cos theta, sin chi sin theta cos phi,
    sin chi sin theta sin phi)`` with measure ``sin^2 chi sin theta``.
    """
    xc, wc = _gauss(n_chi)
    chi = 0.5 * math.pi * (xc + 1.0)
    wchi = 0.5 * math.pi * wc * np.sin(chi) ** 2
    ct, wt = _gauss(n_theta)
    st = np.sqrt(1.0 - ct * ct)
    phi = 2.0 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
    wphi = np.full(n_phi, 2.0 * math.pi / n_phi)
    C, T, P = np.meshgrid(np.arange(n_chi), np.arange(n_theta), np.arange(n_phi), indexing="ij")
    C, T, P = C.ravel(), T.ravel(), P.ravel()
    sc = np.sin(chi[C])
    dirs = np.stack([
        np.cos(chi[C]),
        sc * ct[T],
        sc * st[T] * np.cos(phi[P]),
        sc * st[T] * np.sin(phi[P]),
    ], axis=-1)
    w = wchi[C] * wt[T] * wphi[P]
    dirs.setflags(write=False)
    w.setflags(write=False)
    return dirs, w


def hopf_directions(u):
    """Map points of [0,1)^3 to uniformly distributed unit vectors in R^4."""
    u = np.asarray(u, dtype=float)
    a = np.sqrt(u[:, 0])
    b = np.sqrt(1.0 - u[:, 0])
    p1 = 2.0 * math.pi * u[:, 1]
    p2 = 2.0 * math.pi * u[:, 2]
    return np.stack([a * np.cos(p1), a * np.sin(p1), b * np.cos(p2), b * np.sin(p2)], axis=-1)


def _radial_nodes(r_in, r_out, scale, spec: QuadratureSpec):
    """Nodes/weights (per direction, shape (K, n)) for int_{r_in}^{r_out} g(r) r^3 dr."""
    r_in = np.broadcast_to(np.asarray(r_in, dtype=float), np.shape(r_out))
    r_out = np.asarray(r_out, dtype=float)
    xg, wg = _gauss01(spec.n_radial)
    nodes, weights = [], []
    # segment [r_in, min(scale, r_out)] in r
    lo = r_in
    hi = np.maximum(np.minimum(scale, r_out), lo)
    L = hi - lo
    if np.any(L > 0):
        r = lo[:, None] + L[:, None] * xg[None, :]
        nodes.append(r)
        weights.append(L[:, None] * wg[None, :] * r**3)
    # log panels on [max(scale, r_in), r_out]
    a = np.maximum(hi, r_in)
    mask = r_out > a
    if np.any(mask):
        with np.errstate(divide="ignore"):
            span = np.where(mask, np.log(np.where(mask, r_out, 1.0) / np.where(mask, a, 1.0)), 0.0)
        n_pan = max(1, int(math.ceil(np.max(span) / spec.panel_width)))
        xs = ((np.arange(n_pan)[:, None] + xg[None, :]) / n_pan).ravel()
        ws = np.tile(wg, n_pan) / n_pan
        r = a[:, None] * np.exp(span[:, None] * xs[None, :])
        nodes.append(r)
        weights.append(span[:, None] * ws[None, :] * r**4)
    return np.concatenate(nodes, axis=1), np.concatenate(weights, axis=1)


def _reduce(fun, pts, w):
    vals = np.asarray(fun(pts), dtype=float)
    if vals.ndim == 1:
        return float(np.dot(vals, w))
    return w @ vals


def integrate(fun: Callable, region: Region, spec: QuadratureSpec = QuadratureSpec(),
              scale: Optional[float] = None, chunk: int = 400_000):
    """Integrate ``fun(points)`` over ``region``; ``scale`` is the peak width (split radius).

    ``fun`` receives an array of shape (N, 4) and returns shape (N,) or (N, m).
    """
    center = np.asarray(region.center, dtype=float)
    if spec.scheme == "qmc":
        return _integrate_qmc(fun, region, spec, scale)
    if spec.scheme == "radial":
        dirs = np.array([[1.0, 0.0, 0.0, 0.0]])
        wdir = np.array([OMEGA])
    else:
        dirs, wdir = sphere_rule(spec.n_chi, spec.n_theta, spec.n_phi)
    r_out = region.extent(dirs)
    if scale is None:
        scale = float(np.min(r_out))
    rn, rw = _radial_nodes(region.inner, r_out, scale, spec)
    K, n = rn.shape
    total = None
    step = max(1, chunk // n)
    for k0 in range(0, K, step):
        k1 = min(K, k0 + step)
        pts = center + (rn[k0:k1, :, None] * dirs[k0:k1, None, :]).reshape(-1, 4)
        w = (rw[k0:k1] * wdir[k0:k1, None]).ravel()
        part = _reduce(fun, pts, w)
        total = part if total is None else total + part
    return total


def _integrate_qmc(fun, region: Region, spec: QuadratureSpec, scale):
    center = np.asarray(region.center, dtype=float)
    m = int(round(math.log2(spec.n_points)))
    u = qmc.Sobol(d=4, scramble=True, seed=spec.seed).random_base2(m)
    dirs = hopf_directions(u[:, 1:])
    r_out = region.extent(dirs)
    r_in = region.inner
    if scale is None:
        scale = float(np.min(r_out))
    A = np.arctan((r_out - r_in) / scale)
    r = r_in + scale * np.tan(u[:, 0] * A)
    dr = scale * A * (1.0 + ((r - r_in) / scale) ** 2)
    w = OMEGA * r**3 * dr / u.shape[0]
    return _reduce(fun, center + r[:, None] * dirs, w)


def integrate_sphere(fun: Callable, center, radius: float, spec: QuadratureSpec = QuadratureSpec()):
    """Surface integral over the sphere of given radius; ``fun(points, normals)``."""
    dirs, w = sphere_rule(spec.n_chi, spec.n_theta, spec.n_phi)
    pts = np.asarray(center, dtype=float) + radius * dirs
    vals = np.asarray(fun(pts, dirs), dtype=float)
    ww = w * radius**3
    return float(np.dot(vals, ww)) if vals.ndim == 1 else ww @ vals


def integrate_whole_space_radial(g: Callable, n_nodes: int = 64, scale: float = 1.0) -> float:
    """``omega * int_0^inf g(r) r^3 dr`` with ``r = scale tan(theta)`` and Gauss nodes in theta.

    For rational integrands in ``1 + r^2`` the mapped integrand is a
    trigonometric polynomial, so the rule converges very fast.
    """
    x, w = _gauss(n_nodes)
    th = 0.25 * math.pi * (x + 1.0)
    r = scale * np.tan(th)
    jac = scale * 0.25 * math.pi / np.cos(th) ** 2
    return float(OMEGA * np.sum(w * g(r) * r**3 * jac))
