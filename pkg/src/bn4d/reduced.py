"""Reduced finite-dimensional problem: critical points of f = tau / V.

Substituting ``delta = exp(-t/eps)`` the leading-order reduced map is

    F(t, xi) = (c tau(xi) - t V(xi),  c grad tau(xi) - t grad V(xi)),

with ``c = 4 omega``. Its zeros are ``(t0, xi0)`` with ``xi0`` a critical
point of ``f`` and ``t0 = c f(xi0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .constants import C_REDUCED

__all__ = [
    "ReductionError",
    "NonConvergence",
    "DegenerateCriticalPoint",
    "NewtonOptions",
    "ReducedSolution",
    "eval_f",
    "reduced_map",
    "reduced_jacobian",
    "find_critical_point",
    "degree_sign",
    "delta_of_eps",
]


class ReductionError(RuntimeError):
    """Base class for failures of the reduced solve."""


class NonConvergence(ReductionError):
    pass


class DegenerateCriticalPoint(ReductionError):
    pass


@dataclass(frozen=True)
class NewtonOptions:
    max_iter: int = 50
    grad_tol: float = 1e-12
    step_tol: float = 1e-14
    degeneracy_rtol: float = 1e-10
    max_step: Optional[float] = None


@dataclass
class ReducedSolution:
    xi0: np.ndarray
    t0: float
    f_value: float
    hess_f_det: float
    degree_sign: int
    newton_iters: int
    residual_norm: float
    det_jacobian: float = float("nan")
    degree_sign_reduced: int = 0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["xi0"] = [float(v) for v in self.xi0]
        return d


def eval_f(domain, V, xi):
    """Value, gradient and Hessian of ``tau / V`` by the quotient rule."""
    xi = np.asarray(xi, dtype=float)
    domain.check_margin(xi)
    v = float(V.value(xi))
    if v == 0.0:
        raise ZeroDivisionError("potential vanishes at xi")
    tau = float(domain.tau(xi))
    gt = np.asarray(domain.grad_tau(xi), dtype=float)
    Ht = np.asarray(domain.hess_tau(xi), dtype=float)
    gv = np.asarray(V.grad(xi), dtype=float)
    Hv = np.asarray(V.hess(xi), dtype=float)
    f = tau / v
    grad = gt / v - tau * gv / v**2
    hess = (
        Ht / v
        - (np.outer(gt, gv) + np.outer(gv, gt)) / v**2
        - tau * Hv / v**2
        + 2.0 * tau * np.outer(gv, gv) / v**3
    )
    return f, grad, 0.5 * (hess + hess.T)


def reduced_map(domain, V, t, xi, c: float = C_REDUCED):
    """``F(t, xi)`` as a length-5 vector."""
    xi = np.asarray(xi, dtype=float)
    return np.concatenate([
        [c * float(domain.tau(xi)) - t * float(V.value(xi))],
        c * np.asarray(domain.grad_tau(xi)) - t * np.asarray(V.grad(xi)),
    ])


def reduced_jacobian(domain, V, t, xi, c: float = C_REDUCED):
    """Analytic 5x5 Jacobian of ``F`` with respect to ``(t, xi)``.

    Row 0 is the scalar equation, rows 1..4 the gradient equations; column 0
    is the derivative in ``t``.
    """
    xi = np.asarray(xi, dtype=float)
    J = np.empty((5, 5))
    J[0, 0] = -float(V.value(xi))
    J[0, 1:] = c * np.asarray(domain.grad_tau(xi)) - t * np.asarray(V.grad(xi))
    J[1:, 0] = -np.asarray(V.grad(xi))
    J[1:, 1:] = c * np.asarray(domain.hess_tau(xi)) - t * np.asarray(V.hess(xi))
    return J


def _is_degenerate(H, rtol):
    norm = np.linalg.norm(H, 2)
    return norm == 0.0 or abs(np.linalg.det(H)) < rtol * norm**4


def find_critical_point(domain, V, guess, opts: NewtonOptions = NewtonOptions()) -> ReducedSolution:
    """Newton's method on ``grad f`` from ``guess``.

    Raises
    ------
    NonConvergence
        No convergence within ``opts.max_iter`` steps.
    DegenerateCriticalPoint
        The Hessian at the limit fails the scale-aware determinant test.
    DomainError
        An iterate leaves the region at distance ``rho`` from the boundary.
    ReductionError
        The potential is not positive at the critical point.
    """
    xi = np.array(guess, dtype=float)
    max_step = opts.max_step if opts.max_step is not None else 0.5 * domain.rho
    it = 0
    f, g, H = eval_f(domain, V, xi)
    while np.linalg.norm(g) > opts.grad_tol:
        if it >= opts.max_iter:
            raise NonConvergence(f"no convergence after {it} Newton steps, |grad f| = {np.linalg.norm(g):.3g}")
        if _is_degenerate(H, opts.degeneracy_rtol):
            raise DegenerateCriticalPoint("Hessian of f is singular along the Newton path")
        step = np.linalg.solve(H, -g)
        n = np.linalg.norm(step)
        if n > max_step:
            step *= max_step / n
        xi = xi + step
        it += 1
        f, g, H = eval_f(domain, V, xi)
        if n < opts.step_tol * max(1.0, np.linalg.norm(xi)):
            break
    if np.linalg.norm(g) > max(opts.grad_tol, 1e3 * np.finfo(float).eps * np.linalg.norm(H, 2)):
        raise NonConvergence(f"Newton stalled with |grad f| = {np.linalg.norm(g):.3g}")
    if _is_degenerate(H, opts.degeneracy_rtol):
        raise DegenerateCriticalPoint(f"det D^2 f = {np.linalg.det(H):.3g} below threshold")
    v = float(V.value(xi))
    if v <= 0.0:
        raise ReductionError(f"V(xi0) = {v:.3g} is not positive")
    sol = ReducedSolution(
        xi0=xi,
        t0=C_REDUCED * f,
        f_value=f,
        hess_f_det=float(np.linalg.det(H)),
        degree_sign=0,
        newton_iters=it,
        residual_norm=float(np.linalg.norm(g)),
    )
    sgn, det5, sgn_reduced = _degree(domain, V, sol, opts.degeneracy_rtol)
    sol.degree_sign, sol.det_jacobian, sol.degree_sign_reduced = sgn, det5, sgn_reduced
    return sol


def _degree(domain, V, sol, rtol):
    J = reduced_jacobian(domain, V, sol.t0, sol.xi0)
    det5 = float(np.linalg.det(J))
    if abs(det5) < rtol * np.linalg.norm(J, 2) ** 5:
        raise DegenerateCriticalPoint(f"det F' = {det5:.3g} below threshold")
    _, _, H = eval_f(domain, V, sol.xi0)
    if _is_degenerate(H, rtol):
        raise DegenerateCriticalPoint(f"det D^2 f = {np.linalg.det(H):.3g} below threshold")
    return int(np.sign(det5)), det5, int(np.sign(-np.linalg.det(H)))


def degree_sign(domain, V, sol: ReducedSolution, rtol: float = 1e-10) -> int:
    """Sign of ``det F'(t0, xi0)`` from the full 5x5 Jacobian.

    At a zero of ``F`` the first row reduces to ``(-V, 0)`` and
    ``c D^2 tau - t0 D^2 V = c V D^2 f``, so ``det F' = -c^4 V^5 det D^2 f``.
    The sign is cross-checked against ``sign(-det D^2 f)``; a mismatch raises.
    """
    sgn, _, sgn_reduced = _degree(domain, V, sol, rtol)
    if float(V.value(sol.xi0)) > 0 and sgn != sgn_reduced:
        raise ReductionError("determinant routes disagree on the local degree")
    return sgn


def fd_jacobian(domain, V, t, xi, h: float = 1e-6):
    """Central-difference Jacobian of ``F`` (independent check of :func:`reduced_jacobian`)."""
    z = np.concatenate([[t], np.asarray(xi, dtype=float)])
    J = np.empty((5, 5))
    for k in range(5):
        e = np.zeros(5)
        e[k] = h * max(1.0, abs(z[k]))
        fp = reduced_map(domain, V, z[0] + e[0], z[1:] + e[1:])
        fm = reduced_map(domain, V, z[0] - e[0], z[1:] - e[1:])
        J[:, k] = (fp - fm) / (2 * e[k])
    return J


def delta_of_eps(sol: ReducedSolution, eps: float) -> float:
    """Predicted concentration rate ``exp(-t0 / eps)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return math.exp(-sol.t0 / eps)
