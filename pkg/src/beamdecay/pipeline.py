"""Assemble, integrate and evaluate in one call."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretization import DiscreteBeam, Mesh, assemble, interpolate_initial
from .energy import (EnergyLedger, build_ledger, certificate_check, measured_decay_rate,
                     running_decay_rate, sandwich_check)
from .errors import BeamDecayError
from .model import BeamSpec, BoundaryControls, InitialConditions
from .stability import DecayCertificate, certify
from .timestepper import IntegratorConfig, Trajectory, default_dt, integrate


@dataclass(frozen=True, eq=False)
class SimulationResult:
    beam: DiscreteBeam
    trajectory: Trajectory
    ledger: EnergyLedger
    certificate: DecayCertificate | None

    @property
    def max_residual(self):
        return float(np.max(np.abs(self.ledger.residual)))

    def certificate_holds(self):
        if self.certificate is None or not self.ledger.E0 > 0:
            return None
        return certificate_check(self.ledger, self.certificate)[0]

    def sigma_measured(self, window=None):
        if not self.ledger.E0 > 0:
            return None
        return measured_decay_rate(self.ledger, window)

    def sandwich(self):
        if self.certificate is None:
            return None
        return sandwich_check(self.ledger, self.certificate.bounds, self.certificate.lam)

    def max_energy_increase(self):
        """Largest step-to-step rise of E across snapshots (<= 0 when dissipative)."""
        return float(np.max(np.diff(self.ledger.E))) if self.ledger.E.size > 1 else 0.0

    def envelope(self):
        if self.certificate is None:
            return np.full(self.ledger.times.shape, np.nan)
        return self.certificate.envelope(self.ledger.E0, self.ledger.times)

    def trajectory_rows(self):
        tr, led = self.trajectory, self.ledger
        L = led.L if led.L is not None else led.E
        cols = [tr.times, led.E, led.J, L] + [tr.at_snapshots(getattr(tr, k)) for k in (
            "diss_viscous", "diss_left", "diss_right", "ux0", "uxl", "uxt0", "uxtl")]
        return list(zip(*cols))

    def ledger_rows(self):
        led = self.ledger
        L = led.L if led.L is not None else led.E
        return list(zip(led.times, led.E, led.J, L, led.residual, self.envelope(), running_decay_rate(led)))


def simulate(spec: BeamSpec, bc: BoundaryControls, ic: InitialConditions, n_elements=64,
             dt=None, t_final=20.0, snapshot_stride=1, lam=None, beta=0.25, gamma=0.5) -> SimulationResult:
    """Run the full chain. ``lam=None`` picks the default penalty when a certificate exists."""
    mesh = Mesh.uniform(spec.length, n_elements)
    beam = assemble(spec, bc, mesh)
    q0, v0 = interpolate_initial(ic, mesh)
    if dt is None:
        dt = default_dt(beam, t_final)
    traj = integrate(beam, q0, v0, IntegratorConfig(dt, t_final, beta, gamma, snapshot_stride))
    cert = None
    if spec.gamma > 0:
        try:
            cert = certify(spec, bc, lam)
        except BeamDecayError:
            if lam is not None:
                raise
    ledger = build_ledger(traj, beam, cert.lam if cert is not None else 0.0)
    return SimulationResult(beam, traj, ledger, cert)
