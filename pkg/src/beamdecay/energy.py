"""Energy, auxiliary and Lyapunov functionals evaluated on discrete trajectories.

With the assembled operators the functionals are quadratic forms:

    E = 1/2 v.M.v + 1/2 q.K.q
    J = v.M.q + 1/2 q.C.q

where ``K`` already holds the end springs and ``C`` the viscous part plus the
end dampers. The relations ``dE/dt = -v.C.v`` and ``dJ/dt = 2 v.M.v - 2 E``
hold exactly for the semi-discrete system; the checks below measure how well
the time integrator reproduces them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .discretization import DiscreteBeam
from .errors import InsufficientData, PreconditionViolation, RateUndefined
from .stability import DecayCertificate, LyapunovBounds
from .timestepper import Trajectory


def _quad(A, x, y=None):
    """Row-wise ``x_i . A . y_i`` for 1-D or stacked 2-D inputs."""
    x = np.asarray(x, dtype=float)
    y = x if y is None else np.asarray(y, dtype=float)
    if x.ndim == 1:
        return float(x @ A @ y)
    return np.einsum("ij,ij->i", x @ A, y)


def energy(beam: DiscreteBeam, q, v):
    return 0.5 * _quad(beam.mass, v) + 0.5 * _quad(beam.stiffness, q)


def kinetic(beam: DiscreteBeam, v):
    return 0.5 * _quad(beam.mass, v)


def auxiliary_J(beam: DiscreteBeam, q, v):
    return _quad(beam.mass, v, q) + 0.5 * _quad(beam.damping, q)


def lyapunov_L(E, J, lam):
    return E + lam * J


@dataclass(frozen=True, eq=False)
class EnergyLedger:
    times: np.ndarray
    E: np.ndarray
    J: np.ndarray | None = None
    L: np.ndarray | None = None
    residual: np.ndarray | None = None
    lam: float | None = None

    @property
    def E0(self):
        return float(self.E[0])


def energy_identity_residual(traj: Trajectory, beam: DiscreteBeam):
    """``E(t) + dissipated(t) - E(0)`` at each snapshot; exactly zero at t = 0."""
    E = energy(beam, traj.q, traj.v)
    return E + traj.at_snapshots(traj.total_dissipation) - E[0]


def build_ledger(traj: Trajectory, beam: DiscreteBeam, lam=None) -> EnergyLedger:
    E = energy(beam, traj.q, traj.v)
    J = auxiliary_J(beam, traj.q, traj.v)
    L = lyapunov_L(E, J, lam) if lam is not None else None
    residual = E + traj.at_snapshots(traj.total_dissipation) - E[0]
    return EnergyLedger(traj.times, E, J, L, residual, lam)


def _need_three(traj):
    if traj.times.size < 3:
        raise InsufficientData("derivative checks need at least 3 snapshots")


def dE_dt_check(traj: Trajectory, beam: DiscreteBeam):
    """``(numerical dE/dt, -v.C.v)`` per snapshot; the former by central differences."""
    _need_three(traj)
    E = energy(beam, traj.q, traj.v)
    return np.gradient(E, traj.times, edge_order=2), -_quad(beam.damping, traj.v)


def dJ_dt_check(traj: Trajectory, beam: DiscreteBeam):
    """``(numerical dJ/dt, 2 v.M.v - 2 E)`` per snapshot."""
    _need_three(traj)
    J = auxiliary_J(beam, traj.q, traj.v)
    E = energy(beam, traj.q, traj.v)
    return np.gradient(J, traj.times, edge_order=2), 2 * _quad(beam.mass, traj.v) - 2 * E


CERTIFICATE_RTOL = 1e-6


def certificate_check(ledger: EnergyLedger, cert: DecayCertificate):
    """``(holds, margin)`` for ``E(t) <= M exp(-sigma t) E(0)`` over the snapshots.

    ``margin`` is the smallest envelope-minus-energy gap (negative on failure).
    """
    if not ledger.E0 > 0:
        raise PreconditionViolation("certificate check needs E(0) > 0")
    env = cert.M * np.exp(-cert.sigma * ledger.times) * ledger.E0
    holds = bool(np.all(ledger.E <= env * (1 + CERTIFICATE_RTOL)))
    return holds, float(np.min(env - ledger.E))


def measured_decay_rate(ledger: EnergyLedger, window=None):
    """Least-squares slope of ``-ln E`` over ``window`` (default: middle 80% of the run)."""
    t, E = np.asarray(ledger.times), np.asarray(ledger.E)
    if window is None:
        window = (0.1 * t[-1], 0.9 * t[-1])
    sel = (t >= window[0]) & (t <= window[1])
    if sel.sum() < 2:
        raise InsufficientData("fewer than two snapshots in the window")
    Ew = E[sel]
    # E is a homogeneous quadratic form, so it keeps full relative precision until underflow
    if np.any(Ew <= np.finfo(float).tiny) or not np.all(np.isfinite(Ew)):
        raise RateUndefined("energy reaches zero inside the window")
    slope = np.polyfit(t[sel], -np.log(Ew), 1)[0]
    return float(slope)


def running_decay_rate(ledger: EnergyLedger):
    """``-ln(E(t)/E(0)) / t``, NaN at t = 0 and wherever E has vanished."""
    t, E = np.asarray(ledger.times), np.asarray(ledger.E)
    out = np.full(t.shape, np.nan)
    ok = (t > 0) & (E > np.finfo(float).tiny) & (ledger.E0 > 0)
    out[ok] = -np.log(E[ok] / ledger.E0) / t[ok]
    return out


SANDWICH_SLACK = 1e-9


@dataclass(frozen=True)
class SandwichReport:
    holds: bool
    lower_margin: float  # min of L - (1 - beta0 lam) E
    upper_margin: float  # min of (1 + beta1 lam) E - L
    worst_index: int


def sandwich_check(ledger: EnergyLedger, bounds: LyapunovBounds, lam, slack=SANDWICH_SLACK):
    """``(1 - beta0 lam) E <= L <= (1 + beta1 lam) E`` at every snapshot, ``slack * E(0)`` allowed."""
    E, J = ledger.E, ledger.J
    L = lyapunov_L(E, J, lam)
    low = L - (1 - bounds.beta0 * lam) * E
    up = (1 + bounds.beta1 * lam) * E - L
    tol = slack * ledger.E0
    worst = int(np.argmin(np.minimum(low, up)))
    return SandwichReport(bool(low.min() >= -tol and up.min() >= -tol), float(low.min()), float(up.min()), worst)


def sandwich_extremes(beam: DiscreteBeam):
    """Exact ``(min, max)`` of ``J / E`` over all nonzero discrete states, with extremal states.

    Returns ``(lo, hi, state_lo, state_hi)``; states are stacked ``(q, v)``.
    """
    n = beam.n_dofs
    M, K, C = beam.mass, beam.stiffness, beam.damping
    Ef = 0.5 * np.block([[K, np.zeros((n, n))], [np.zeros((n, n)), M]])
    Jf = np.block([[0.5 * C, 0.5 * M], [0.5 * M, np.zeros((n, n))]])
    w, vecs = linalg.eigh(Jf, Ef)
    return float(w[0]), float(w[-1]), vecs[:, 0], vecs[:, -1]
