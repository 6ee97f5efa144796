# How good is the projected bubble as an approximate solution?
#
# The residual PU^3 - U^3 + eps V PU is measured in L^{4/3}. At eps = 0 it
# should fall like delta^2; at fixed delta it grows linearly in eps, with a
# slope proportional to delta.

from bn4d import BallDomain, BubbleParams, ConstantPotential
from bn4d import verify as vf

ball, V = BallDomain(1.0), ConstantPotential(1.0)

deltas = [0.1, 0.05, 0.025, 0.0125]
vals = [vf.error_norm(ball, V, BubbleParams(d), 0.0) for d in deltas]
for d, v in zip(deltas, vals):
    print(f"delta={d:<7g} ||E|| = {v:.6e}")
print("fitted slope:", round(vf.loglog_slope(deltas, vals), 4))

grid = [0.25, 0.5, 1.0, 2.0]
for d in (0.01, 0.005):
    e1, e0, _ = vf.error_norm_eps_coefficient(ball, V, BubbleParams(d), grid)
    print(f"delta={d:<6g} d||E||/d eps = {e1:.5f}  per delta = {e1 / d:.3f}")

# The same number from three quadrature schemes.
from bn4d.quadrature import QuadratureSpec

p = BubbleParams(0.05, (0.1, 0.0, 0.0, 0.0))
for spec in (QuadratureSpec(), QuadratureSpec().doubled(), QuadratureSpec(scheme="qmc", n_points=2**18)):
    print(spec.scheme, vf.error_norm(ball, V, p, 0.3, spec))
