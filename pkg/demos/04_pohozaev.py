# A local Pohozaev identity around the concentration point.
#
# Testing the equation against d_j u on a small ball turns the volume
# integral into boundary terms. For the ansatz, both sides should match
# -delta^2/2 frak_C^2 d_j tau(xi) when eps = 0.

from bn4d import BallDomain, BubbleParams, ConstantPotential
from bn4d import verify as vf

ball, V = BallDomain(1.0), ConstantPotential(1.0)

for xi in ((0.0, 0.0, 0.0, 0.0), (0.3, 0.0, 0.0, 0.0), (0.45, 0.0, 0.0, 0.0)):
    for d in (1e-2, 1e-3):
        rep = vf.pohozaev_check(ball, V, BubbleParams(d, xi), 0.0, eta=0.2)
        print(f"xi1={xi[0]:<4} delta={d:<6g} interior={rep.numeric_value:+.6e} "
              f"boundary={rep.secondary_value:+.6e} predicted={rep.predicted_value:+.6e}")
