"""
Simulating a damped beam and auditing the energy
=================================================

Integrate one row of the table in time and compare what the energy actually
does with what the certificate promises.
"""

import numpy as np

from beamdecay import BeamSpec, BoundaryControls, InitialConditions, simulate

spec = BeamSpec.proportional(0.502, 2.14e-3, 0.31e-3, gamma=1.0)
bc = BoundaryControls(ka_left=0.01, ka_right=0.01)
ic = InitialConditions.demo()  # half-sine deflection, at rest

res = simulate(spec, bc, ic, n_elements=64, dt=1e-3, t_final=20.0, snapshot_stride=10)
led, cert = res.ledger, res.certificate

# E(t) + dissipated(t) should stay at E(0); the residual is the scheme's error
print(f"E(0) = {led.E0:.4e}")
print(f"max |identity residual| / E(0) = {res.max_residual / led.E0:.2e}")
print(f"largest energy rise between snapshots = {res.max_energy_increase():.2e}")

tr = res.trajectory
for name in ("diss_viscous", "diss_left", "diss_right"):
    print(f"  {name:13s} {getattr(tr, name)[-1] / led.E0:.4f} of E(0)")

print(f"certificate: M={cert.M:.3f} sigma={cert.sigma:.3f} holds={res.certificate_holds()}")
print(f"measured sigma = {res.sigma_measured():.3f}")
print(f"sandwich -beta0 E <= J <= beta1 E holds: {res.sandwich().holds}")

# a few points of the envelope against the computed energy
env = res.envelope()
for k in np.linspace(0, led.times.size - 1, 6).astype(int):
    print(f"  t={led.times[k]:5.1f}  E/E0={led.E[k] / led.E0:.3e}  bound={env[k] / led.E0:.3e}")
