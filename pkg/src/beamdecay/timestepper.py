"""Implicit Newmark integration of ``M q'' + C q' + K q = 0``.

The defaults (beta, gamma) = (1/4, 1/2) give the average-acceleration rule:
second order, unconditionally stable, no numerical damping. The effective
matrix is constant, so it is factored once in banded form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .discretization import HALF_BANDWIDTH, DiscreteBeam, to_upper_banded
from .errors import DomainError, NumericalError, PreconditionViolation


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    t_final: float
    beta: float = 0.25
    gamma: float = 0.5
    snapshot_stride: int = 1

    def __post_init__(self):
        if not (self.dt > 0 and self.t_final > 0):
            raise PreconditionViolation("dt and t_final must be positive")
        if self.gamma < 0.5 or self.beta < self.gamma / 2:
            raise PreconditionViolation("need gamma >= 1/2 and beta >= gamma/2 for unconditional stability")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise PreconditionViolation("snapshot_stride must be a positive integer")

    @property
    def n_steps(self):
        return max(1, int(round(self.t_final / self.dt)))


def _factor(a):
    try:
        return linalg.cholesky_banded(to_upper_banded(a, HALF_BANDWIDTH), lower=False)
    except linalg.LinAlgError as exc:
        raise NumericalError(f"effective matrix is not positive definite ({exc})") from None


class NewmarkStepper:
    """One-step map for fixed ``(M, C, K, dt)``. ``dt`` may be negative (backward stepping)."""

    def __init__(self, M, C, K, dt, beta=0.25, gamma=0.5):
        self.M, self.C, self.K = M, C, K
        self.dt, self.beta, self.gamma = dt, beta, gamma
        self._eff = _factor(M + gamma * dt * C + beta * dt * dt * K)
        self._mass = None

    @classmethod
    def for_beam(cls, beam: DiscreteBeam, dt, beta=0.25, gamma=0.5):
        return cls(beam.mass, beam.damping, beam.stiffness, dt, beta, gamma)

    def initial_acceleration(self, q, v):
        if self._mass is None:
            self._mass = _factor(self.M)
        return linalg.cho_solve_banded((self._mass, False), -self.C @ v - self.K @ q)

    def step(self, q, v, a):
        dt, b, g = self.dt, self.beta, self.gamma
        q_pred = q + dt * v + dt * dt * (0.5 - b) * a
        v_pred = v + dt * (1.0 - g) * a
        a_new = linalg.cho_solve_banded((self._eff, False), -self.C @ v_pred - self.K @ q_pred,
                                        check_finite=False)
        return q_pred + b * dt * dt * a_new, v_pred + g * dt * a_new, a_new


def amplification_matrix(stepper: NewmarkStepper):
    """Matrix of the step map on ``(q, v)`` with the acceleration kept consistent."""
    n = stepper.M.shape[0]
    G = np.empty((2 * n, 2 * n))
    for j in range(2 * n):
        e = np.zeros(2 * n)
        e[j] = 1.0
        q, v = e[:n], e[n:]
        q1, v1, _ = stepper.step(q, v, stepper.initial_acceleration(q, v))
        G[:, j] = np.concatenate([q1, v1])
    return G


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Snapshots of the state plus per-step boundary traces and dissipation.

    ``times``, ``q``, ``v``, ``a`` are sampled every ``snapshot_stride`` steps;
    ``step_times`` and the trace/accumulator arrays hold every step.
    ``snapshot_steps`` indexes the per-step arrays at the snapshots.
    """

    times: np.ndarray
    q: np.ndarray
    v: np.ndarray
    a: np.ndarray
    step_times: np.ndarray
    snapshot_steps: np.ndarray
    ux0: np.ndarray
    uxl: np.ndarray
    uxt0: np.ndarray
    uxtl: np.ndarray
    diss_viscous: np.ndarray
    diss_left: np.ndarray
    diss_right: np.ndarray
    config: IntegratorConfig

    def at_snapshots(self, per_step):
        return np.asarray(per_step)[self.snapshot_steps]

    @property
    def total_dissipation(self):
        """Per-step sum of the three dissipation integrals."""
        return self.diss_viscous + self.diss_left + self.diss_right


def integrate(beam: DiscreteBeam, q0, v0, cfg: IntegratorConfig) -> Trajectory:
    q0 = np.asarray(q0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    n = beam.n_dofs
    if q0.shape != (n,) or v0.shape != (n,):
        raise PreconditionViolation(f"state vectors must have length {n}")
    stepper = NewmarkStepper.for_beam(beam, cfg.dt, cfg.beta, cfg.gamma)
    n_steps, dt, stride = cfg.n_steps, cfg.dt, cfg.snapshot_stride
    snap_steps = np.arange(0, n_steps + 1, stride)
    if snap_steps[-1] != n_steps:
        snap_steps = np.append(snap_steps, n_steps)
    n_snap = snap_steps.size

    Q, V, A = (np.empty((n_snap, n)) for _ in range(3))
    traces = np.empty((4, n_steps + 1))
    diss = np.zeros((3, n_steps + 1))
    L, R = beam.left_rotation, beam.right_rotation
    Cv = beam.viscous
    kal, kar = beam.bc.ka_left, beam.bc.ka_right

    q, v = q0.copy(), v0.copy()
    a = stepper.initial_acceleration(q, v)
    rate = np.array([v @ Cv @ v, kal * v[L] ** 2, kar * v[R] ** 2])
    traces[:, 0] = q[L], q[R], v[L], v[R]
    snap = 0
    if snap_steps[0] == 0:
        Q[0], V[0], A[0] = q, v, a
        snap = 1
    for k in range(1, n_steps + 1):
        q, v, a = stepper.step(q, v, a)
        new_rate = np.array([v @ Cv @ v, kal * v[L] ** 2, kar * v[R] ** 2])
        diss[:, k] = diss[:, k - 1] + 0.5 * dt * (rate + new_rate)
        rate = new_rate
        traces[:, k] = q[L], q[R], v[L], v[R]
        if snap < n_snap and snap_steps[snap] == k:
            Q[snap], V[snap], A[snap] = q, v, a
            snap += 1
    if not np.all(np.isfinite(Q[-1])):
        raise NumericalError("non-finite state encountered")
    step_times = dt * np.arange(n_steps + 1)
    return Trajectory(step_times[snap_steps], Q, V, A, step_times, snap_steps,
                      *traces, *diss, cfg)


def resample_traces(traj: Trajectory, times):
    """Boundary traces linearly interpolated at ``times``; keys ``ux0, uxl, uxt0, uxtl``."""
    times = np.asarray(times, dtype=float)
    t = traj.step_times
    if times.size and (times.min() < t[0] or times.max() > t[-1]):
        raise DomainError(f"requested times outside [{t[0]}, {t[-1]}]")
    return {name: np.interp(times, t, getattr(traj, name)) for name in ("ux0", "uxl", "uxt0", "uxtl")}


def estimate_omega_max(beam: DiscreteBeam, iterations=300, seed=0):
    """Power-iteration estimate of the largest natural frequency of ``(K, M)``."""
    rng = np.random.default_rng(seed)
    mass = _factor(beam.mass)
    x = rng.standard_normal(beam.n_dofs)
    lam = 0.0
    for _ in range(iterations):
        y = linalg.cho_solve_banded((mass, False), beam.stiffness @ x)
        x = y / np.linalg.norm(y)
        lam = (x @ beam.stiffness @ x) / (x @ beam.mass @ x)
    return float(np.sqrt(lam))


def default_dt(beam: DiscreteBeam, t_final):
    return min(2 * np.pi / (20 * estimate_omega_max(beam)), t_final / 2000)
