"""
Stronger end dampers do not always mean faster decay
=====================================================

At a fixed state the boundary dampers always remove energy faster when
they are stronger.  Along a trajectory that ordering can flip: a very
stiff damper nearly freezes the end rotation, so little energy flows
through it.
"""

from beamdecay import BeamSpec, BoundaryControls, InitialConditions, simulate

spec = BeamSpec.proportional(0.502, 2.14e-3, 0.31e-3, gamma=1.0)

print("ka       E(5)/E(0)   boundary dissipation / E(0)")
for ka in (0.0, 1e-4, 1e-3, 1e-2, 1e-1):
    res = simulate(spec, BoundaryControls(ka_left=ka, ka_right=ka), InitialConditions.demo(),
                   n_elements=32, dt=1e-3, t_final=5.0, snapshot_stride=50)
    tr, led = res.trajectory, res.ledger
    boundary = (tr.diss_left[-1] + tr.diss_right[-1]) / led.E0
    print(f"{ka:<8g} {led.E[-1] / led.E0:<11.3e} {boundary:.3e}")
