"""Quadrature checks of the blow-up expansions.

Each check integrates the relevant quantity for the ansatz ``u = PU`` (the
corrector is dropped; its contributions are of higher order) and compares
it with the leading-order prediction. Two forms of PU are used: the exact
projection when the bubble sits at the center of a ball, and the
first-order expansion ``U - frak_C delta H(., xi)`` otherwise. Both satisfy
``-Delta PU = U^3`` in the domain exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy.special import beta as beta_fn

from .bubbles import (
    BubbleParams,
    eval_bubble,
    eval_psi,
    exact_PU_ball,
    eval_PU_expansion,
    grad_bubble,
)
from .constants import FRAK_c, FRAK_C, OMEGA
from .domain import BallDomain, DomainError
from .quadrature import (
    QuadratureSpec,
    Region,
    integrate,
    integrate_sphere,
    integrate_whole_space_radial,
    sphere_rule,
)

__all__ = [
    "ExpansionReport",
    "QuadratureError",
    "integral_omega_over_12",
    "integral_inverse_cube",
    "projection_defect",
    "error_norm",
    "error_norm_eps_coefficient",
    "reduced_expansion_check",
    "pohozaev_routes",
    "pohozaev_check",
    "dominance_constants",
    "dominance_closed_forms",
    "loglog_slope",
    "ProjectedBubble",
]


class QuadratureError(RuntimeError):
    pass


@dataclass
class ExpansionReport:
    check_name: str
    delta: float
    eps: float
    numeric_value: float
    predicted_value: float
    ratio: float
    fitted_slope: float = float("nan")
    secondary_value: float = float("nan")
    flag: str = ""

    def as_dict(self) -> dict:
        return asdict(self)

    def csv_row(self) -> list:
        return [self.check_name, self.delta, self.eps, self.numeric_value,
                self.predicted_value, self.ratio, self.fitted_slope]


def _ratio(num, pred):
    return num / pred if pred != 0 else float("nan")


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log|y|`` against ``log x``."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.abs(np.asarray(y, dtype=float)))
    return float(np.polyfit(lx, ly, 1)[0])


# ---------------------------------------------------------------------------
# Whole-space constants
# ---------------------------------------------------------------------------


def _omega12_integrand(r):
    r2 = r * r
    return (r2 - 1.0) / (1.0 + r2) ** 4


def integral_omega_over_12(method: str = "adaptive", n_nodes: int = 64,
                           n_points: int = 2**14, seed: int = 0) -> float:
    """``int_{R^4} (|t|^2 - 1)/(1 + |t|^2)^4 dt`` (closed form: omega / 12).

    ``method`` is ``"adaptive"`` (scipy.quad on the radial reduction),
    ``"gauss"`` (mapped Gauss-Legendre) or ``"qmc"`` (4D scrambled Sobol).
    """
    if method == "adaptive":
        val, err = sp_integrate.quad(lambda r: r**3 * _omega12_integrand(r), 0.0, np.inf,
                                     epsabs=1e-14, epsrel=1e-13, limit=200)
        if not err < 1e-10:
            raise QuadratureError(f"adaptive quadrature error estimate {err:.3g}")
        return OMEGA * val
    if method == "gauss":
        return integrate_whole_space_radial(_omega12_integrand, n_nodes)
    if method == "qmc":
        spec = QuadratureSpec(scheme="qmc", n_points=n_points, seed=seed)

        def f(x):
            return _omega12_integrand(np.sqrt(np.sum(x * x, axis=-1)))

        return _qmc_whole_space(f, spec)
    raise ValueError(f"unknown method {method!r}")


def _qmc_whole_space(fun, spec: QuadratureSpec) -> float:
    """QMC over R^4 with ``r = tan(pi u / 2)`` and uniform Hopf directions."""
    from scipy.stats import qmc
    from .quadrature import hopf_directions

    m = int(round(math.log2(spec.n_points)))
    u = qmc.Sobol(d=4, scramble=True, seed=spec.seed).random_base2(m)
    th = 0.5 * math.pi * u[:, 0]
    r = np.tan(th)
    dr = 0.5 * math.pi / np.cos(th) ** 2
    pts = r[:, None] * hopf_directions(u[:, 1:])
    return float(OMEGA * np.mean(fun(pts) * r**3 * dr))


def integral_inverse_cube(n_nodes: int = 64) -> float:
    """``int_{R^4} (1 + |t|^2)^{-3} dt`` (closed form omega / 4)."""
    return integrate_whole_space_radial(lambda r: (1.0 + r * r) ** -3, n_nodes)


def dominance_constants(n_nodes: int = 64, spec: QuadratureSpec = QuadratureSpec()):
    """Diagonal constants and off-diagonal entries of the kernel Gram system.

    Returns ``(a, b, offdiag)`` with ``a = int U^2 (psi^0)^2``,
    ``b = int U^2 psi^1 d_1 U`` over R^4 (both independent of delta after
    the natural rescaling) and ``offdiag`` a dict of the entries that vanish
    by parity, computed with the full 4D tensor rule.
    """
    c = FRAK_c

    def a_int(r):
        r2 = r * r
        return c**4 * (1.0 - r2) ** 2 / (1.0 + r2) ** 6

    def b_int(r):
        # psi^1 = d_1 U; the spherical mean of y_1^2 is r^2 / 4
        r2 = r * r
        return c**4 * r2 / (1.0 + r2) ** 6

    a = integrate_whole_space_radial(a_int, n_nodes)
    b = integrate_whole_space_radial(b_int, n_nodes)

    p = BubbleParams(1.0)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    th = 0.25 * math.pi * (x + 1.0)
    r = np.tan(th)
    rw = w * r**3 * 0.25 * math.pi / np.cos(th) ** 2
    dirs, wd = sphere_rule(spec.n_chi, spec.n_theta, spec.n_phi)
    pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 4)
    ww = (rw[:, None] * wd[None, :]).ravel()
    U2 = eval_bubble(p, pts) ** 2
    psis = [eval_psi(j, p, pts) for j in range(5)]
    offdiag = {}
    for j in range(1, 5):
        offdiag[f"psi{j}_psi0"] = float(np.dot(ww, U2 * psis[j] * psis[0]))
    for l in range(1, 5):
        for j in range(l + 1, 5):
            offdiag[f"psi{l}_psi{j}"] = float(np.dot(ww, U2 * psis[l] * psis[j]))
    return a, b, offdiag


def dominance_closed_forms():
    """Beta-function values of ``a`` and ``b``: both equal ``omega c^4 / 60``."""
    c4 = FRAK_c**4
    a = OMEGA * c4 / 2 * (beta_fn(2, 4) - 2 * beta_fn(3, 3) + beta_fn(4, 2))
    b = OMEGA * c4 / 2 * beta_fn(3, 3)
    return a, b


# ---------------------------------------------------------------------------
# Projected bubble
# ---------------------------------------------------------------------------


@dataclass
class ProjectedBubble:
    """``PU`` together with ``U - PU`` (computed without cancellation) and its gradient."""

    p: BubbleParams
    domain: object
    exact: bool

    @classmethod
    def build(cls, domain, p: BubbleParams, prefer_exact: bool = True):
        exact = (
            prefer_exact
            and isinstance(domain, BallDomain)
            and np.allclose(p.xi_array, domain.center, rtol=0, atol=1e-14)
        )
        return cls(p, domain, exact)

    def U(self, x):
        return eval_bubble(self.p, x)

    def defect(self, x):
        """``U - PU``."""
        d = self.p.delta
        if self.exact:
            R = self.domain.radius
            return np.full(np.shape(x)[:-1], FRAK_c * d / (d * d + R * R))
        return FRAK_C * d * self.domain.regular_part(x, self.p.xi_array)

    def grad_defect(self, x):
        if self.exact:
            return np.zeros(np.shape(x))
        return FRAK_C * self.p.delta * self.domain.grad_regular_part(x, self.p.xi_array)

    def value(self, x):
        return self.U(x) - self.defect(x)

    def grad(self, x):
        return grad_bubble(self.p, x) - self.grad_defect(x)

    def cube_difference(self, x):
        """``U^3 - PU^3`` via the factorisation ``k (U^2 + U PU + PU^2)``."""
        U = self.U(x)
        k = self.defect(x)
        P = U - k
        return k * (U * U + U * P + P * P)


def _domain_region(domain, p: BubbleParams) -> Region:
    if isinstance(domain, BallDomain):
        c = np.asarray(domain.center)
        xi = p.xi_array
        R = domain.radius

        def exit_dist(dirs):
            rel = xi - c
            b = dirs @ rel
            return -b + np.sqrt(b * b - (rel @ rel - R * R))

        return Region(tuple(xi), exit_dist)
    return Region.domain(domain, p.xi_array)


def projection_defect(p: BubbleParams, R: float = 1.0, n_samples: int = 2048, seed: int = 0) -> float:
    """Sup over sample points of ``|exact_PU_ball - eval_PU_expansion|`` (bubble at the center)."""
    dom = BallDomain(radius=R)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n_samples, 4))
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    rad = R * rng.random(n_samples) ** 0.25
    pts = np.concatenate([g * rad[:, None], np.zeros((1, 4)), g[:8] * R])
    diff = exact_PU_ball(p, R, pts) - eval_PU_expansion(p, pts, dom)
    return float(np.max(np.abs(diff)))


# ---------------------------------------------------------------------------
# Error norm of the ansatz
# ---------------------------------------------------------------------------


def error_norm(domain, V, p: BubbleParams, eps: float,
               q: QuadratureSpec = QuadratureSpec(), prefer_exact: bool = True) -> float:
    """``|| PU^3 - U^3 + eps V PU ||_{L^{4/3}(Omega)}``.

    The H^1_0 norm of the error term is bounded by S^{-1} times this
    quantity, so its rate in ``delta`` and ``eps`` is the same.
    """
    p.check_domain(domain)
    pb = ProjectedBubble.build(domain, p, prefer_exact)

    def f(x):
        val = -pb.cube_difference(x) + eps * np.asarray(V.value(x)) * pb.value(x)
        return np.abs(val) ** (4.0 / 3.0)

    val = integrate(f, _domain_region(domain, p), q, scale=p.delta)
    if not np.isfinite(val):
        raise QuadratureError("non-finite error-norm quadrature")
    return float(val) ** 0.75


def error_norm_eps_coefficient(domain, V, p: BubbleParams, eps_grid: Sequence[float],
                               q: QuadratureSpec = QuadratureSpec()):
    """Least-squares line ``||E||(eps) ~ e0 + e1 eps`` at fixed ``delta``; returns ``(e1, e0, values)``."""
    vals = np.array([error_norm(domain, V, p, e, q) for e in eps_grid])
    e1, e0 = np.polyfit(np.asarray(eps_grid, dtype=float), vals, 1)
    return float(e1), float(e0), vals


# ---------------------------------------------------------------------------
# Dilation test of the equation
# ---------------------------------------------------------------------------


def reduced_expansion_check(domain, V, p: BubbleParams, eps: float,
                            q: QuadratureSpec = QuadratureSpec(),
                            prefer_exact: bool = True) -> ExpansionReport:
    """Compare ``int (-Delta PU - PU^3 - eps V PU) psi^0`` with its two-term prediction.

    The prediction is ``frak_C^2 delta^2 tau(xi) + eps delta^2 ln(delta) c^2 omega V(xi)``.
    The report is flagged when the two predicted terms differ by more than
    a factor 10, where one of them is below the resolution of the other's
    remainder.
    """
    p.check_domain(domain)
    pb = ProjectedBubble.build(domain, p, prefer_exact)
    d = p.delta

    def f(x):
        P = pb.value(x)
        return (pb.cube_difference(x) - eps * np.asarray(V.value(x)) * P) * eval_psi(0, p, x)

    numeric = float(integrate(f, _domain_region(domain, p), q, scale=d))
    xi = p.xi_array
    t1 = FRAK_C**2 * d * d * float(domain.tau(xi))
    t2 = eps * d * d * math.log(d) * FRAK_c**2 * OMEGA * float(V.value(xi))
    pred = t1 + t2
    flag = ""
    if eps != 0 and t1 != 0:
        q12 = abs(t2 / t1)
        if q12 > 10 or q12 < 0.1:
            flag = f"terms unbalanced (|eps term / tau term| = {q12:.3g})"
    return ExpansionReport("reduced_expansion", d, eps, numeric, pred, _ratio(numeric, pred), flag=flag)


# ---------------------------------------------------------------------------
# Local Pohozaev identity
# ---------------------------------------------------------------------------


def pohozaev_routes(u: Callable, grad_u: Callable, minus_lap_u: Callable, center, eta: float,
                    j: int, q: QuadratureSpec = QuadratureSpec(), eps: float = 0.0, V=None,
                    scale: Optional[float] = None, cube_residual: Optional[Callable] = None):
    """Both sides of the local Pohozaev identity on ``B(center, eta)`` for direction ``j`` (1..4).

    interior: ``int_B (-Delta u - u^3 - eps V u) d_j u``;
    boundary: ``int_{dB} (-d_nu u d_j u + |grad u|^2 nu_j / 2 - u^4 nu_j / 4)``
    ``+ eps/2 int_B d_j V u^2 - eps/2 int_{dB} V u^2 nu_j``.

    ``cube_residual``, when given, returns ``-Delta u - u^3`` directly, so
    near-cancelling peak values are not subtracted numerically.
    """
    if j not in (1, 2, 3, 4):
        raise ValueError("direction index must be in 1..4")
    k = j - 1
    center = np.asarray(center, dtype=float)
    region = Region.ball(center, eta)
    scale = eta if scale is None else scale

    def interior(x):
        uu = u(x)
        du = grad_u(x)[:, k]
        res = cube_residual(x) if cube_residual is not None else minus_lap_u(x) - uu**3
        if eps:
            res = res - eps * np.asarray(V.value(x)) * uu
        return res * du

    I_int = float(integrate(interior, region, q, scale=scale))

    def flux(x, nu):
        uu = u(x)
        g = grad_u(x)
        dnu = np.sum(g * nu, axis=-1)
        val = -dnu * g[:, k] + 0.5 * np.sum(g * g, axis=-1) * nu[:, k] - 0.25 * uu**4 * nu[:, k]
        if eps:
            val = val - 0.5 * eps * np.asarray(V.value(x)) * uu**2 * nu[:, k]
        return val

    I_bnd = integrate_sphere(flux, center, eta, q)
    if eps:
        I_bnd += 0.5 * eps * float(
            integrate(lambda x: np.asarray(V.grad(x))[:, k] * u(x) ** 2, region, q, scale=scale)
        )
    return I_int, float(I_bnd)


def pohozaev_check(domain, V, p: BubbleParams, eps: float, eta: Optional[float] = None,
                   q: QuadratureSpec = QuadratureSpec(), j: int = 1,
                   prefer_exact: bool = True) -> ExpansionReport:
    """Pohozaev test of the ansatz in direction ``j`` against
    ``-delta^2 / 2 [frak_C^2 d_j tau(xi) + eps ln(delta) omega c^2 d_j V(xi)]``.

    ``eta`` defaults to half the distance from ``xi`` to the boundary.
    ``numeric_value`` is the interior route, ``secondary_value`` the
    boundary route.
    """
    p.check_domain(domain)
    xi = p.xi_array
    dist = float(domain.boundary_distance(xi))
    if eta is None:
        eta = 0.5 * dist
    if not 0 < eta < dist:
        raise DomainError(f"shell radius {eta:.3g} does not fit inside the domain (distance {dist:.3g})")
    if eta < 4 * p.delta:
        raise QuadratureError("shell radius is not large compared to delta")
    pb = ProjectedBubble.build(domain, p, prefer_exact)

    def minus_lap(x):
        return pb.U(x) ** 3

    I_int, I_bnd = pohozaev_routes(
        pb.value, pb.grad, minus_lap, xi, eta, j, q, eps=eps, V=V, scale=p.delta,
        cube_residual=pb.cube_difference,
    )
    d = p.delta
    k = j - 1
    gt = np.asarray(domain.grad_tau(xi))[k]
    gv = np.asarray(V.grad(xi))[k]
    pred = -0.5 * d * d * (FRAK_C**2 * gt + eps * math.log(d) * OMEGA * FRAK_c**2 * gv)
    return ExpansionReport("pohozaev", d, eps, I_int, pred, _ratio(I_int, pred),
                           secondary_value=I_bnd)
