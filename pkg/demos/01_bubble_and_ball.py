# The standard bubble and the potential theory of the ball.
#
# Everything here has a closed form, so this is mostly a sanity tour of the
# basic building blocks before anything is integrated or solved.

import numpy as np

from bn4d import BallDomain, BubbleParams, eval_bubble, eval_PU_expansion, exact_PU_ball
from bn4d.constants import CONSTANTS

for k, v in CONSTANTS.as_dict().items():
    print(f"{k:10s} {v:.12g}")

# A bubble at the origin is a rescaled copy of U(x) = c / (1 + |x|^2);
# its peak height is c / delta.
for d in (1.0, 0.1, 0.01):
    print(f"delta={d:<5g} peak={eval_bubble(BubbleParams(d), np.zeros(4)):.6f}")

# The unit ball: G vanishes on the sphere, H(., 0) is flat, tau blows up
# towards the boundary.
ball = BallDomain(1.0)
rng = np.random.default_rng(0)
e = rng.normal(size=(5, 4))
e /= np.linalg.norm(e, axis=1, keepdims=True)
print("max |G(x, 0)| on the sphere:", np.max(np.abs(ball.green(e, np.zeros(4)))))
for r in (0.0, 0.25, 0.5, 0.75):
    x = np.array([r, 0, 0, 0])
    print(f"|x|={r:<4g} tau={ball.tau(x):.6f} dtau/dx1={ball.grad_tau(x)[0]:.6f}")

# Projection onto H^1_0: the exact centered projection subtracts a constant.
# The first-order expansion misses it by c delta^3 / (1 + delta^2).
x = np.array([0.3, 0.2, 0.0, 0.1])
for d in (0.1, 0.01, 0.001):
    p = BubbleParams(d)
    gap = exact_PU_ball(p, 1.0, x) - eval_PU_expansion(p, x, ball)
    print(f"delta={d:<6g} exact - expansion = {gap:.3e}")
