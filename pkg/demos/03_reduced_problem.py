# The finite-dimensional problem.
#
# Concentration points are critical points of f = tau / V; the rate is
# delta = exp(-t0 / eps) with t0 = c f(xi0). Here: the unit ball with a
# flat potential, then a Gaussian bump that moves the critical point.

import numpy as np

from bn4d import BallDomain, ConstantPotential, GaussianBumps, QuadraticPotential
from bn4d import delta_of_eps, find_critical_point

ball = BallDomain(1.0)

sol = find_critical_point(ball, ConstantPotential(1.0), (0.3, 0.0, 0.0, 0.0))
print("flat V: xi0 =", np.round(sol.xi0, 12), " t0 =", sol.t0, " degree =", sol.degree_sign)
for eps in (0.5, 0.3, 0.2):
    print(f"  eps={eps}: predicted delta = {delta_of_eps(sol, eps):.4e}")

bump = GaussianBumps([(1.0, (0.4, 0.0, 0.0, 0.0), 0.2)], offset=0.5)
sol = find_critical_point(ball, bump, (0.4, 0.0, 0.0, 0.0))
print("bump: xi0 =", np.round(sol.xi0, 6), " t0 =", round(sol.t0, 6),
      " det F' =", f"{sol.det_jacobian:.4e}", " degree =", sol.degree_sign)

# A potential that curves faster than tau gives a saddle of f and flips the degree.
sad = QuadraticPotential(1.0, A=np.diag([8.0, 0, 0, 0]))
sol = find_critical_point(ball, sad, (0.05, 0.0, 0.0, 0.0))
print("saddle: degree =", sol.degree_sign, "(both routes:", sol.degree_sign_reduced, ")")
