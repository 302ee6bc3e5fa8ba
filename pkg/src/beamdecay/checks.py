"""Randomized property suites: functional inequalities, Lyapunov sandwich, dissipativity.

Each suite returns a ``SuiteResult``; on failure it carries the worst
offending profile as named columns, ready for CSV output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discretization import Mesh, assemble, evaluate, interpolate_initial
from .energy import build_ledger, energy, sandwich_check, sandwich_extremes
from .model import BoundaryControls, InitialConditions, Profile, reference_beam
from .stability import (REFERENCE_ROWS, LyapunovBounds, bounds_for, poincare_check, random_spline_profile,
                        trace_check)
from .timestepper import IntegratorConfig, integrate

SUITES = ("poincare", "trace", "sandwich", "dissipativity")


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    counterexample: dict | None = None
    worst_violation: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return self.passed == self.total

    def record(self, ok, violation, make_example):
        self.total += 1
        if ok:
            self.passed += 1
        elif violation > self.worst_violation or self.counterexample is None:
            self.worst_violation = violation
            self.counterexample = make_example()


def poincare_suite(rng, n_profiles=1000, length=1.0):
    res = SuiteResult("poincare")
    for _ in range(n_profiles):
        L = length * rng.uniform(0.2, 5.0)
        u = random_spline_profile(rng, L)
        chk = poincare_check(u, L)
        res.record(chk.holds, chk.lhs - chk.rhs,
                   lambda: {"x": np.linspace(0, L, u.size), "u": u})
    return res


def trace_suite(rng, n_profiles=1000, length=1.0):
    res = SuiteResult("trace")
    for _ in range(n_profiles):
        L = length * rng.uniform(0.2, 5.0)
        u = random_spline_profile(rng, L)
        chk = trace_check(u, L)
        res.record(chk.holds, max(chk.left, chk.right) - chk.rhs,
                   lambda: {"x": np.linspace(0, L, u.size), "u": u})
    return res


def _state_profile(beam, state, n_points=201):
    n = beam.n_dofs
    x = np.linspace(0.0, beam.mesh.length, n_points)
    return {"x": x, "u": evaluate(beam, state[:n], x), "u_t": evaluate(beam, state[n:], x)}


def sandwich_suite(beta0_scale=1.0, beta1_scale=1.0, n_elements=32, t_final=4.0, dt=2e-3):
    """Sandwich bounds on every reference-row beam: exact extremes of J/E, then a short run."""
    res = SuiteResult("sandwich")
    for gamma, kal, kar, lam in REFERENCE_ROWS:
        spec = reference_beam(gamma)
        bc = BoundaryControls(ka_left=kal, ka_right=kar)
        b = bounds_for(spec, bc)
        bounds = LyapunovBounds(beta0_scale * b.beta0, beta1_scale * b.beta1, b.variant)
        beam = assemble(spec, bc, Mesh.uniform(spec.length, n_elements))

        lo, hi, s_lo, s_hi = sandwich_extremes(beam)
        res.record(lo >= -bounds.beta0, -bounds.beta0 - lo, lambda: _state_profile(beam, s_lo))
        res.record(hi <= bounds.beta1, hi - bounds.beta1, lambda: _state_profile(beam, s_hi))

        q0, v0 = interpolate_initial(InitialConditions.demo(), beam.mesh)
        traj = integrate(beam, q0, v0, IntegratorConfig(dt, t_final, snapshot_stride=5))
        led = build_ledger(traj, beam, lam)
        rep = sandwich_check(led, bounds, lam)
        i = rep.worst_index
        res.record(rep.holds, -min(rep.lower_margin, rep.upper_margin),
                   lambda: _state_profile(beam, np.concatenate([traj.q[i], traj.v[i]])))
    return res


def dissipativity_suite(rng, n_cases=12, n_elements=16, t_final=2.0, dt=1e-3, tol=1e-10):
    """Random nonnegative damping/spring constants; E must never rise by more than ``tol * E0``."""
    res = SuiteResult("dissipativity")
    for _ in range(n_cases):
        gamma = rng.uniform(0.0, 5.0)
        bc = BoundaryControls(*rng.uniform(0.0, 0.02, size=4))
        spec = reference_beam(gamma)
        beam = assemble(spec, bc, Mesh.uniform(spec.length, n_elements))
        ic = InitialConditions(Profile.sine(0.01, int(rng.integers(1, 4))), Profile.sine(rng.normal(0, 0.1)))
        q0, v0 = interpolate_initial(ic, beam.mesh)
        traj = integrate(beam, q0, v0, IntegratorConfig(dt, t_final))
        E = energy(beam, traj.q, traj.v)
        rise = float(np.max(np.diff(E)) / E[0])
        k = int(np.argmax(np.diff(E))) + 1
        res.record(rise <= tol, rise, lambda: _state_profile(beam, np.concatenate([traj.q[k], traj.v[k]])))
    return res


def run_suites(names=SUITES, seed=42, n_profiles=1000, beta0_scale=1.0, beta1_scale=1.0):
    rng = np.random.default_rng(seed)
    out = []
    for name in names:
        if name == "poincare":
            out.append(poincare_suite(rng, n_profiles))
        elif name == "trace":
            out.append(trace_suite(rng, n_profiles))
        elif name == "sandwich":
            out.append(sandwich_suite(beta0_scale, beta1_scale))
        elif name == "dissipativity":
            out.append(dissipativity_suite(rng))
        else:
            raise ValueError(f"unknown suite {name!r}")
    return out
