"""
How the certified rate depends on the damping
==============================================

Sweep the viscous coefficient and the end dampers and look at the
certified decay rate.  All of this is closed form, so it is fast.
"""

import numpy as np

from beamdecay import BeamSpec, BoundaryControls, certify

gammas = np.logspace(-2, 1, 7)
kas = [0.0, 1e-3, 1e-2]

print("gamma     " + "".join(f"ka={ka:<8g}" for ka in kas))
for g in gammas:
    spec = BeamSpec.proportional(0.502, 2.14e-3, 0.31e-3, g)
    sig = [certify(spec, BoundaryControls(ka_left=ka, ka_right=ka)).sigma for ka in kas]
    print(f"{g:<10.3g}" + "".join(f"{s:<11.4f}" for s in sig))

# the end dampers only enter the upper bound beta1, so at a fixed penalty
# they can only lower the certified rate; the trajectories can disagree
# (strong dampers clamp the end rotation), see overdamped_ends.py
