"""Radial ground-truth solutions on the ball by shooting on the center value.

The radial problem is ``-u'' - (3/r) u' = u^3 + eps V(r) u``, ``u'(0) = 0``,
``u(R) = 0``. For a trial center value ``M`` the profile is integrated in
two phases:

* inner: the rescaled profile ``v(s) = delta u(delta s)``, ``delta = c / M``,
  on ``s in [s0, s_match]``, started from the regular series at ``s0``;
* outer: ``(u, r u_r)`` as functions of ``ln r`` up to ``r = R``.

The log-radius variable keeps the step count bounded however large ``M`` is.
Energy and Pohozaev integrals are carried along as extra ODE states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .bubbles import eval_U
from .constants import FRAK_c
from .domain import ConstantPotential, Potential

__all__ = [
    "ShootingError",
    "RadialProblem",
    "RadialSolveResult",
    "ShootOptions",
    "integrate_profile",
    "shoot",
    "auto_bracket",
    "sweep",
    "SweepRow",
    "SweepResult",
    "find_eps_max",
    "rescaled_profile_error",
]


class ShootingError(RuntimeError):
    """Raised when a shot cannot be completed or the bracket is unusable."""


@dataclass(frozen=True)
class RadialProblem:
    R: float = 1.0
    eps: float = 0.5
    V: Potential = field(default_factory=ConstantPotential)
    center: tuple = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("R must be positive")
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    def v_of_r(self, r):
        """Potential along the first axis; the potential is assumed radial."""
        r = np.asarray(r, dtype=float)
        pts = np.zeros(r.shape + (4,)) + np.asarray(self.center, dtype=float)
        pts[..., 0] += r
        return np.asarray(self.V.value(pts), dtype=float)

    def dv_of_r(self, r):
        r = np.asarray(r, dtype=float)
        pts = np.zeros(r.shape + (4,)) + np.asarray(self.center, dtype=float)
        pts[..., 0] += r
        return np.asarray(self.V.grad(pts), dtype=float)[..., 0]


@dataclass(frozen=True)
class ShootOptions:
    rtol: float = 1e-11
    atol_scale: float = 1e-13
    s0: float = 1e-3
    s_match: float = 10.0
    xtol_log: float = 1e-14
    max_bisect: int = 200
    n_profile: int = 400
    method: str = "DOP853"

    def refined(self, factor: float = 0.5) -> "ShootOptions":
        return replace(self, rtol=self.rtol * factor, atol_scale=self.atol_scale * factor)


@dataclass
class RadialSolveResult:
    eps: float
    R: float
    u0: float
    delta_num: float
    shoot_residual: float
    uprime_R: float
    profile_r: np.ndarray
    profile_u: np.ndarray
    energy_grad: float
    energy_quartic: float
    energy_potential: float
    pohozaev_lhs: float
    first_zero: Optional[float]
    half_width: float
    n_shots: int
    _evaluator: object = field(default=None, repr=False, compare=False)

    def evaluate(self, r):
        """Evaluate the accepted profile at radii ``r`` from the dense ODE output."""
        return self._evaluator(np.atleast_1d(np.asarray(r, dtype=float)))

    @property
    def delta_halfwidth(self) -> float:
        """Alternative rate from the radius where ``u = u0/2`` (equals delta for a bubble)."""
        return self.half_width

    @property
    def energy_residual(self) -> float:
        rhs = self.energy_quartic + self.eps * self.energy_potential
        return abs(self.energy_grad - rhs) / abs(self.energy_grad)

    @property
    def pohozaev_residual(self) -> float:
        rhs = 0.5 * self.R**4 * self.uprime_R**2
        lhs = self.eps * self.pohozaev_lhs
        return abs(lhs - rhs) / max(abs(rhs), abs(lhs))

    def as_dict(self) -> dict:
        return {
            "eps": self.eps,
            "R": self.R,
            "u0": self.u0,
            "delta_num": self.delta_num,
            "delta_halfwidth": self.half_width,
            "shoot_residual": self.shoot_residual,
            "energy_residual": self.energy_residual,
            "pohozaev_residual": self.pohozaev_residual,
            "n_shots": self.n_shots,
        }


@dataclass
class _Trajectory:
    u_R: float
    up_R: float
    first_zero: Optional[float]
    integrals: np.ndarray
    inner: object
    outer: object
    delta: float
    s_end: float


def _bubble_r(delta, r):
    return FRAK_c * delta / (delta * delta + r * r)


def integrate_profile(prob: RadialProblem, M: float, opts: ShootOptions = ShootOptions(),
                      dense: bool = False) -> _Trajectory:
    """Integrate the radial ODE from the regular center with ``u(0) = M``.

    The unknown is the deviation from the bubble of the same height, which
    stays of the size of ``u(R)`` itself; integrating ``u`` directly would
    recover ``u(R) ~ delta`` by cancelling terms of size ``1/delta``.
    """
    if not M > 0:
        raise ShootingError("center value must be positive")
    eps = prob.eps
    c = FRAK_c
    delta = FRAK_c / M
    mu = eps * delta * delta
    s_end = min(opts.s_match, prob.R / delta)
    s0 = min(opts.s0, 0.5 * s_end)

    # inner state: z = v - c/(1+s^2), z', then scaled energy integrals
    def inner_rhs(s, y):
        z, zp = y[0], y[1]
        r = delta * s
        Vr = prob.v_of_r(r)
        dVr = prob.dv_of_r(r)
        b = c / (1.0 + s * s)
        bp = -2.0 * c * s / (1.0 + s * s) ** 2
        v = b + z
        vp = bp + zp
        zpp = -3.0 * zp / s - z * (3.0 * b * b + 3.0 * b * z + z * z) - mu * Vr * v
        s3 = s**3
        return [
            zp,
            zpp,
            vp * vp * s3,
            v**4 * s3,
            delta**2 * Vr * v * v * s3,
            delta**2 * (Vr + 0.5 * r * dVr) * v * v * s3,
        ]

    V0 = float(prob.v_of_r(0.0))
    z_s0 = -mu * V0 * c * s0**2 / 8.0
    zp_s0 = -mu * V0 * c * s0 / 4.0
    a2 = (c**3 + mu * V0 * c) / 8.0
    I0 = [
        (2 * a2) ** 2 * s0**6 / 6.0,
        c**4 * s0**4 / 4.0,
        delta**2 * V0 * c * c * s0**4 / 4.0,
        delta**2 * V0 * c * c * s0**4 / 4.0,
    ]
    a = opts.atol_scale
    d2 = delta * delta
    zscale = max(mu * max(abs(V0), 1.0), 1e-300)
    inner = solve_ivp(
        inner_rhs,
        (s0, s_end),
        [z_s0, zp_s0, *I0],
        method=opts.method,
        rtol=opts.rtol,
        atol=[a * zscale, a * zscale, a, a, a * d2, a * d2],
        dense_output=dense,
    )
    if inner.status != 0:
        raise ShootingError(f"inner integration failed: {inner.message}")
    z_e, zp_e = inner.y[0, -1], inner.y[1, -1]
    I_inner = inner.y[2:, -1]
    first_zero = None
    v_inner = c / (1.0 + inner.t**2) + inner.y[0]
    if np.any(v_inner <= 0):
        first_zero = delta * inner.t[int(np.argmax(v_inner <= 0))]

    outer = None
    if s_end * delta >= prob.R * (1 - 1e-15):
        u_R = (c / (1.0 + s_end**2) + z_e) / delta
        up_R = (-2.0 * c * s_end / (1.0 + s_end**2) ** 2 + zp_e) / delta**2
        integrals = I_inner
    else:
        # outer state: w = u - U_delta, r w_r, then energy integrals, in t = ln r
        def outer_rhs(t, y):
            w, wt = y[0], y[1]
            r = math.exp(t)
            r2 = r * r
            Vr = prob.v_of_r(r)
            dVr = prob.dv_of_r(r)
            U = _bubble_r(delta, r)
            u = U + w
            ut = -2.0 * U * r2 / (d2 + r2) + wt
            r4 = r2 * r2
            return [
                wt,
                -2.0 * wt - r2 * (w * (3.0 * U * U + 3.0 * U * w + w * w) + eps * Vr * u),
                ut * ut * r2,
                u**4 * r4,
                Vr * u * u * r4,
                (Vr + 0.5 * r * dVr) * u * u * r4,
            ]

        def crossing(t, y):
            return _bubble_r(delta, math.exp(t)) + y[0]

        crossing.terminal = False
        crossing.direction = -1

        r_m = s_end * delta
        t0 = math.log(r_m)
        w_e = z_e / delta
        wt_e = s_end * zp_e / delta
        outer = solve_ivp(
            outer_rhs,
            (t0, math.log(prob.R)),
            [w_e, wt_e, *I_inner],
            method=opts.method,
            rtol=opts.rtol,
            atol=[a * delta, a * delta, a, a, a * d2, a * d2],
            events=crossing,
            dense_output=dense,
        )
        if outer.status != 0:
            raise ShootingError(f"outer integration failed: {outer.message}")
        U_R = _bubble_r(delta, prob.R)
        u_R = U_R + outer.y[0, -1]
        Ut_R = -2.0 * U_R * prob.R**2 / (d2 + prob.R**2)
        up_R = (Ut_R + outer.y[1, -1]) / prob.R
        integrals = outer.y[2:, -1]
        if first_zero is None and len(outer.t_events[0]):
            tz = outer.t_events[0][0]
            if tz < math.log(prob.R) - 1e-12:
                first_zero = math.exp(tz)
    return _Trajectory(float(u_R), float(up_R), first_zero, integrals, inner, outer, delta, s_end)


def auto_bracket(prob: RadialProblem, t0_guess: float, opts: ShootOptions = ShootOptions(),
                 width: float = 3.0, max_expand: int = 12):
    """Find ``(M_lo, M_hi)`` with ``u(R; M_lo) > 0 > u(R; M_hi)`` around the predicted rate.

    The search starts from ``M = c exp(t0/eps) / R`` and widens geometrically.
    """
    mid = math.log(FRAK_c / prob.R) + t0_guess / prob.eps
    lo, hi = mid - width, mid + width
    for _ in range(max_expand):
        f_lo = integrate_profile(prob, math.exp(lo), opts).u_R
        if f_lo > 0:
            break
        lo -= width
    else:
        raise ShootingError("no center value with u(R) > 0 found")
    for _ in range(max_expand):
        f_hi = integrate_profile(prob, math.exp(hi), opts).u_R
        if f_hi < 0:
            break
        lo = hi
        hi += width
    else:
        raise ShootingError("no center value with u(R) < 0 found; eps may exceed eps_max")
    # Tighten to the first sign change so higher (nodal) branches are excluded.
    grid = np.linspace(lo, hi, 13)
    prev_x, prev_f = grid[0], integrate_profile(prob, math.exp(grid[0]), opts).u_R
    for x in grid[1:]:
        f = integrate_profile(prob, math.exp(x), opts).u_R
        if prev_f > 0 >= f:
            return math.exp(prev_x), math.exp(x)
        prev_x, prev_f = x, f
    return math.exp(lo), math.exp(hi)


def _profile(prob: RadialProblem, traj: _Trajectory, n: int):
    """Sample (r, u) on a grid that is logarithmic near the peak and linear outside."""
    r_lo = traj.inner.t[0] * traj.delta
    r = np.unique(np.concatenate([
        [0.0],
        np.geomspace(r_lo, prob.R, n // 2),
        np.linspace(0.0, prob.R, n - n // 2),
    ]))
    return r, _evaluate(prob, traj, r)


def _evaluate(prob: RadialProblem, traj: _Trajectory, r):
    delta = traj.delta
    u = np.empty_like(r)
    s_max = traj.s_end
    for i, ri in enumerate(r):
        s = ri / delta
        if s <= traj.inner.t[0]:
            a2 = (FRAK_c**3 + prob.eps * delta**2 * float(prob.v_of_r(0.0)) * FRAK_c) / 8.0
            u[i] = (FRAK_c - a2 * s * s) / delta
        elif s <= s_max or traj.outer is None:
            sc = min(s, s_max)
            u[i] = (FRAK_c / (1.0 + sc * sc) + traj.inner.sol(sc)[0]) / delta
        else:
            u[i] = _bubble_r(delta, ri) + traj.outer.sol(math.log(ri))[0]
    return u


def _half_width(traj: _Trajectory, u0: float) -> float:
    """Radius where the profile drops to half its center value (bubble: r = delta)."""
    from scipy.optimize import brentq as _brentq

    inner = traj.inner
    target = 0.5 * u0 * traj.delta

    def v(s):
        return FRAK_c / (1.0 + s * s) + inner.sol(s)[0]

    vals = FRAK_c / (1.0 + inner.t**2) + inner.y[0]
    if vals[-1] > target:
        return float("nan")
    k = int(np.argmax(vals <= target))
    s_hw = _brentq(lambda s: v(s) - target, inner.t[max(k - 1, 0)], inner.t[k])
    return float(s_hw * traj.delta)


def shoot(prob: RadialProblem, M_bracket, opts: ShootOptions = ShootOptions()) -> RadialSolveResult:
    """Solve ``u(R) = 0`` for the center value inside ``M_bracket`` by Brent's method in ``ln M``.

    Raises
    ------
    ShootingError
        If the bracket does not straddle a sign change of ``u(R)``, if a
        trajectory cannot be integrated, or if the accepted solution
        changes sign before ``R``.
    """
    M_lo, M_hi = map(float, M_bracket)
    if not (0 < M_lo < M_hi):
        raise ShootingError("bracket must satisfy 0 < M_lo < M_hi")
    count = [0]

    def fun(logM):
        count[0] += 1
        return integrate_profile(prob, math.exp(logM), opts).u_R

    f_lo, f_hi = fun(math.log(M_lo)), fun(math.log(M_hi))
    if not f_lo * f_hi < 0:
        raise ShootingError(
            f"bracket invalid: u(R) = {f_lo:.3g} at M_lo and {f_hi:.3g} at M_hi"
        )
    logM = brentq(fun, math.log(M_lo), math.log(M_hi), xtol=opts.xtol_log,
                  rtol=4 * np.finfo(float).eps, maxiter=opts.max_bisect)
    M = math.exp(logM)
    traj = integrate_profile(prob, M, opts, dense=True)
    if traj.first_zero is not None and traj.first_zero < prob.R * (1 - 1e-6):
        raise ShootingError(
            f"solution changes sign at r = {traj.first_zero:.4g} < R (sign-changing regime)"
        )
    r, u = _profile(prob, traj, opts.n_profile)
    I_grad, I_quart, I_pot, I_poho = traj.integrals
    return RadialSolveResult(
        eps=prob.eps,
        R=prob.R,
        u0=M,
        delta_num=FRAK_c / M,
        shoot_residual=abs(traj.u_R),
        uprime_R=traj.up_R,
        profile_r=r,
        profile_u=u,
        energy_grad=float(I_grad),
        energy_quartic=float(I_quart),
        energy_potential=float(I_pot),
        pohozaev_lhs=float(I_poho),
        first_zero=traj.first_zero,
        half_width=_half_width(traj, M),
        n_shots=count[0],
        _evaluator=lambda rr: _evaluate(prob, traj, rr),
    )


@dataclass
class SweepRow:
    eps: float
    u0: float
    delta_num: float
    eps_ln_inv_delta: float
    t0_pred: float
    status: str
    delta_halfwidth: float = float("nan")


@dataclass
class SweepResult:
    rows: list
    slope: float
    intercept: float
    t0_pred: float

    def ok_rows(self):
        return [r for r in self.rows if r.status == "ok"]


def _fit_slope(rows):
    ok = [r for r in rows if r.status == "ok"]
    if len(ok) < 2:
        return float("nan"), float("nan")
    x = np.array([1.0 / r.eps for r in ok])
    y = np.array([math.log(1.0 / r.delta_num) for r in ok])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def _solve_row(args):
    template, eps, t0, opts = args
    prob = replace(template, eps=eps)
    try:
        bracket = auto_bracket(prob, t0, opts)
        res = shoot(prob, bracket, opts)
    except ShootingError as exc:
        return SweepRow(eps, float("nan"), float("nan"), float("nan"), t0, f"failed: {exc}")
    return SweepRow(
        eps=eps,
        u0=res.u0,
        delta_num=res.delta_num,
        eps_ln_inv_delta=eps * math.log(1.0 / res.delta_num),
        t0_pred=t0,
        status="ok",
        delta_halfwidth=res.half_width,
    )


def sweep(template: RadialProblem, eps_grid: Sequence[float], t0: float,
          opts: ShootOptions = ShootOptions(), threads: int = 1) -> SweepResult:
    """Solve along a decreasing grid of ``eps`` and fit ``ln(1/delta)`` against ``1/eps``.

    ``t0`` is the predicted rate (from the reduced problem); it is used to
    seed each bracket and is echoed in every row. Failed rows are kept with
    their error message and excluded from the fit.
    """
    eps_grid = [float(e) for e in eps_grid]
    if any(b >= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise ValueError("eps_grid must be strictly decreasing")
    jobs = [(template, e, float(t0), opts) for e in eps_grid]
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_solve_row, jobs))
    else:
        rows = [_solve_row(j) for j in jobs]
    slope, intercept = _fit_slope(rows)
    return SweepResult(rows=rows, slope=slope, intercept=intercept, t0_pred=float(t0))


def rescaled_profile_error(res: RadialSolveResult, s_max: float = 5.0, n: int = 101) -> float:
    """Max relative deviation of ``delta u(delta s)`` from the standard bubble on ``[0, s_max]``."""
    s = np.linspace(0.0, s_max, n)
    u = res.evaluate(s * res.delta_num)
    U = eval_U(np.stack([s, np.zeros_like(s), np.zeros_like(s), np.zeros_like(s)], axis=-1))
    return float(np.max(np.abs(res.delta_num * u - U) / U))


def find_eps_max(template: RadialProblem, eps_hi: float, t0: float = 2.0,
                 opts: ShootOptions = ShootOptions(), tol: float = 1e-3) -> float:
    """Bisect on ``eps`` for the loss of a positive solution.

    ``eps_hi`` must be a value where no bracket exists (e.g. above the first
    Dirichlet eigenvalue); the returned value is the largest ``eps`` found
    solvable, within ``tol`` relative.
    """
    def solvable(e):
        try:
            prob = replace(template, eps=e)
            shoot(prob, auto_bracket(prob, t0, opts, max_expand=6), opts)
            return True
        except ShootingError:
            return False

    if solvable(eps_hi):
        raise ShootingError("eps_hi is still solvable; raise it")
    lo, hi = 0.5 * eps_hi, eps_hi
    while not solvable(lo):
        hi, lo = lo, 0.5 * lo
        if lo < 1e-3:
            raise ShootingError("no solvable eps found")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if solvable(mid):
            lo = mid
        else:
            hi = mid
    return lo
