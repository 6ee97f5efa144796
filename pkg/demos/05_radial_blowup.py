# Ground truth: positive radial solutions on the ball.
#
# Shooting on the center value, then reading off delta = c / u(0). The
# reduced problem predicts eps ln(1/delta) -> t0 = 2 on the unit ball.

import math

from bn4d import RadialProblem, find_critical_point, BallDomain, ConstantPotential, sweep
from bn4d.radialode import auto_bracket, rescaled_profile_error, shoot

t0 = find_critical_point(BallDomain(1.0), ConstantPotential(1.0), (0.2, 0, 0, 0)).t0

prob = RadialProblem(R=1.0, eps=0.3)
res = shoot(prob, auto_bracket(prob, t0))
print(f"eps=0.3: u(0)={res.u0:.6e} delta={res.delta_num:.6e} "
      f"energy residual={res.energy_residual:.1e} bubble profile error={rescaled_profile_error(res):.2e}")

grid = [0.5, 0.4, 0.3, 0.25, 0.2, 0.15, 0.125]
out = sweep(RadialProblem(), grid, t0)
print(" eps     delta_num      eps*ln(1/delta)   ln(delta) + t0/eps")
for r in out.rows:
    print(f" {r.eps:<6g} {r.delta_num:.6e}   {r.eps_ln_inv_delta:.6f}          "
          f"{math.log(r.delta_num) + t0 / r.eps:+.4f}")
print("slope of ln(1/delta) against 1/eps:", round(out.slope, 4), " predicted:", t0)

# The last column settles to a constant: delta ~ C exp(-t0/eps) with C < 1.
