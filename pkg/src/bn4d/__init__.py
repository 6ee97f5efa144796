"""Concentrating solutions of -Delta u = u^3 + eps V u in a 4D domain, u = 0 on the boundary.

Bubbles and their projections, potential theory of the domain, the reduced
finite-dimensional problem, quadrature checks of the expansions, and radial
shooting for ground truth on the ball.
"""

__version__ = "0.1.0"

from .constants import CONSTANTS, FRAK_c, FRAK_C, OMEGA, C_REDUCED, Constants
from .bubbles import BubbleParams, eval_U, eval_bubble, eval_psi, eval_PU_expansion, exact_PU_ball
from .domain import (
    BallDomain,
    CustomDomain,
    ConstantPotential,
    QuadraticPotential,
    GaussianBumps,
    green_ball,
    robin_tau_ball,
    grad_hess_tau,
)
from .reduced import ReducedSolution, eval_f, find_critical_point, degree_sign, delta_of_eps
from .quadrature import QuadratureSpec, Region
from .radialode import RadialProblem, RadialSolveResult, shoot, sweep, auto_bracket

__all__ = [
    "CONSTANTS", "FRAK_c", "FRAK_C", "OMEGA", "C_REDUCED", "Constants",
    "BubbleParams", "eval_U", "eval_bubble", "eval_psi", "eval_PU_expansion", "exact_PU_ball",
    "BallDomain", "CustomDomain", "ConstantPotential", "QuadraticPotential", "GaussianBumps",
    "green_ball", "robin_tau_ball", "grad_hess_tau",
    "ReducedSolution", "eval_f", "find_critical_point", "degree_sign", "delta_of_eps",
    "QuadratureSpec", "Region",
    "RadialProblem", "RadialSolveResult", "shoot", "sweep", "auto_bracket",
]
