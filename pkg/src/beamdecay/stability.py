"""Lyapunov sandwich constants, admissible penalty range and the decay certificate.

For a beam with viscous damping ``gamma * m`` and end dampers ``ka``, the
energy obeys ``E(t) <= M exp(-sigma t) E(0)`` with

    M = (1 + beta1 lam) / (1 - beta0 lam),   sigma = 2 lam / (1 + beta1 lam),

for any penalty ``0 < lam < min(1/beta0, gamma m0 / (2 m1))``. Two formulas
for ``beta1`` are provided: the general variable-coefficient one and the
constant-coefficient one. They agree except for the end-damper term, where
the general formula carries twice the compliance ``l / r0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .errors import CertificateIneligible, DomainError, LambdaInadmissible, PreconditionViolation
from .model import BeamSpec, BoundaryControls

LAMBDA_FRACTION = 0.96
INEQUALITY_SLACK = 1e-8


@dataclass(frozen=True)
class LyapunovBounds:
    """Constants with ``-beta0 E <= J <= beta1 E`` (both in seconds)."""

    beta0: float
    beta1: float
    variant: str  # "general" or "constant-coefficient"


@dataclass(frozen=True)
class DecayCertificate:
    lam: float
    M: float
    sigma: float
    lambda_max: float
    bounds: LyapunovBounds

    def envelope(self, E0, times):
        return decay_envelope(self, E0, times)


def _require_positive(**kw):
    for name, v in kw.items():
        if not (math.isfinite(v) and v > 0):
            raise DomainError(f"{name} must be positive, got {v!r}")


def _require_nonnegative(**kw):
    for name, v in kw.items():
        if not (math.isfinite(v) and v >= 0):
            raise DomainError(f"{name} must be nonnegative, got {v!r}")


def beta_bounds_general(m1, mu1, r0, length, ka_left=0.0, ka_right=0.0) -> LyapunovBounds:
    """Sandwich constants for variable coefficients, from the bounds ``m1``, ``mu1``, ``r0``."""
    _require_positive(m1=m1, r0=r0, length=length)
    _require_nonnegative(mu1=mu1, ka_left=ka_left, ka_right=ka_right)
    beta0 = 0.5 * length**2 * math.sqrt(m1 / r0)
    extra = (length**2 * mu1 + 2.0 / length * (ka_left + ka_right)) / math.sqrt(m1 * r0)
    return LyapunovBounds(beta0, beta0 * (1.0 + extra), "general")


def beta_bounds_constant(m, gamma, r, length, ka_left=0.0, ka_right=0.0) -> LyapunovBounds:
    """Sandwich constants for constant ``m``, ``r`` and viscous damping ``gamma m``."""
    _require_positive(m=m, r=r, length=length)
    _require_nonnegative(gamma=gamma, ka_left=ka_left, ka_right=ka_right)
    beta0 = 0.5 * length**2 * math.sqrt(m / r)
    beta1 = beta0 * (1.0 + length**2 * math.sqrt(m / r) * gamma) + length / (2.0 * r) * (ka_left + ka_right)
    return LyapunovBounds(beta0, beta1, "constant-coefficient")


def bounds_for(spec: BeamSpec, bc: BoundaryControls) -> LyapunovBounds:
    """Constant-coefficient constants when all fields are constant, general ones otherwise."""
    if spec.is_constant:
        return beta_bounds_constant(spec.mass.values[0], spec.gamma, spec.rigidity.values[0],
                                    spec.length, bc.ka_left, bc.ka_right)
    b = spec.bounds()
    return beta_bounds_general(b["m1"], b["mu1"], b["r0"], spec.length, bc.ka_left, bc.ka_right)


def lambda_range(beta0, gamma, m0, m1):
    """Open admissible interval ``(0, min(1/beta0, gamma m0 / (2 m1)))`` for the penalty."""
    if not gamma > 0:
        raise CertificateIneligible("exponential decay is only certified for gamma > 0")
    _require_positive(beta0=beta0, m0=m0, m1=m1)
    return 0.0, min(1.0 / beta0, gamma * m0 / (2.0 * m1))


def certificate(bounds: LyapunovBounds, lam, gamma, m0, m1) -> DecayCertificate:
    _, upper = lambda_range(bounds.beta0, gamma, m0, m1)
    if not lam > 0:
        raise LambdaInadmissible(f"lambda={lam} must be positive", bound="lower")
    if not lam < 1.0 / bounds.beta0:
        raise LambdaInadmissible(f"lambda={lam} must be below 1/beta0={1.0 / bounds.beta0:.6g}",
                                 bound="inverse_beta0")
    if not lam < gamma * m0 / (2.0 * m1):
        raise LambdaInadmissible(f"lambda={lam} must be below gamma*m0/(2*m1)={gamma * m0 / (2 * m1):.6g}",
                                 bound="damping")
    M = (1.0 + bounds.beta1 * lam) / (1.0 - bounds.beta0 * lam)
    sigma = 2.0 * lam / (1.0 + bounds.beta1 * lam)
    return DecayCertificate(lam, M, sigma, upper, bounds)


def certify(spec: BeamSpec, bc: BoundaryControls, lam=None, fraction=LAMBDA_FRACTION) -> DecayCertificate:
    """Certificate for a beam; ``lam`` defaults to ``fraction * lambda_max``."""
    b = spec.bounds()
    bounds = bounds_for(spec, bc)
    _, upper = lambda_range(bounds.beta0, spec.gamma, b["m0"], b["m1"])
    return certificate(bounds, fraction * upper if lam is None else lam, spec.gamma, b["m0"], b["m1"])


def decay_envelope(cert: DecayCertificate, E0, times):
    times = np.asarray(times, dtype=float)
    return E0 * cert.M * np.exp(-cert.sigma * times)


# ---------------------------------------------------------------------------
# the functional inequalities behind the sandwich, checked on sampled profiles


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class TraceCheck:
    left: float
    right: float
    rhs: float
    left_holds: bool
    right_holds: bool

    @property
    def holds(self):
        return self.left_holds and self.right_holds


def _profile_grid(u, length):
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size < 5:
        raise PreconditionViolation("profile needs at least 5 samples")
    scale = max(np.abs(u).max(), 1e-300)
    if abs(u[0]) > 1e-14 * scale or abs(u[-1]) > 1e-14 * scale:
        raise PreconditionViolation("profile must vanish at both endpoints")
    return u, length / (u.size - 1)


def second_difference(u, h):
    """Second derivative samples: central inside, second-order one-sided at the ends."""
    d2 = np.empty_like(u)
    d2[1:-1] = (u[2:] - 2 * u[1:-1] + u[:-2]) / h**2
    d2[0] = (2 * u[0] - 5 * u[1] + 4 * u[2] - u[3]) / h**2
    d2[-1] = (2 * u[-1] - 5 * u[-2] + 4 * u[-3] - u[-4]) / h**2
    return d2


def poincare_check(u, length) -> InequalityCheck:
    """``int u^2 <= (l^4 / 4) int u''^2`` for samples ``u`` on a uniform grid over [0, l]."""
    u, h = _profile_grid(u, length)
    lhs = simpson(u**2, dx=h)
    rhs = 0.25 * length**4 * simpson(second_difference(u, h) ** 2, dx=h)
    return InequalityCheck(float(lhs), float(rhs), bool(lhs <= rhs * (1 + INEQUALITY_SLACK)))


def trace_check(u, length) -> TraceCheck:
    """``u'(0)^2 <= l int u''^2`` and ``u'(l)^2 <= l int u''^2``."""
    u, h = _profile_grid(u, length)
    d0 = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h)
    dl = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * h)
    rhs = float(length * simpson(second_difference(u, h) ** 2, dx=h))
    tol = 1 + INEQUALITY_SLACK
    return TraceCheck(float(d0**2), float(dl**2), rhs, bool(d0**2 <= rhs * tol), bool(dl**2 <= rhs * tol))


def random_spline_profile(rng, length=1.0, n_knots=None, n_samples=401):
    """Samples of a random cubic spline through zero at both ends."""
    if n_knots is None:
        n_knots = int(rng.integers(3, 12))
    x = np.linspace(0.0, length, n_knots + 2)
    y = np.concatenate([[0.0], rng.normal(size=n_knots), [0.0]])
    xs = np.linspace(0.0, length, n_samples)
    u = CubicSpline(x, y)(xs)
    u[0] = u[-1] = 0.0
    return u


# ---------------------------------------------------------------------------
# reference decay-rate table (strip of length 0.502 m, see model.REFERENCE_*)

# (gamma, ka_left, ka_right, lambda)
REFERENCE_ROWS = (
    (0.1, 0.0, 0.0, 0.04),
    (0.1, 0.01, 0.01, 0.04),
    (1.0, 0.0, 0.0, 0.4),
    (1.0, 0.01, 0.01, 0.4),
    (5.0, 0.0, 0.0, 2.4),
    (5.0, 0.01, 0.01, 2.4),
)
# (beta0, beta1, M, sigma) as tabulated, two decimals
REFERENCE_VALUES = (
    (0.33, 0.35, 1.03, 0.08),
    (0.33, 16.55, 1.68, 0.05),
    (0.33, 0.55, 1.41, 0.66),
    (0.33, 16.75, 8.87, 0.10),
    (0.33, 1.42, 21.19, 1.09),
    (0.33, 17.62, 208.12, 0.11),
)
REFERENCE_LAMBDA = {g: lam for g, _, _, lam in REFERENCE_ROWS}


def round_half_even(x, places=2):
    return float(Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


def round_sig(x, digits=3):
    if x == 0:
        return 0.0
    return round_half_even(x, digits - 1 - int(math.floor(math.log10(abs(x)))))


def tabulated_certificate(m, gamma, r, length, ka_left, ka_right, lam):
    """Certificate at the working precision of a hand-computed two-decimal table.

    ``beta0`` is rounded to two decimals and reused inside ``beta1``; the end
    compliance ``l / (2 r)`` is carried to three significant figures; the
    rounded ``beta0, beta1`` then feed ``M`` and ``sigma``. Use ``certificate``
    for full-precision values.
    """
    exact = beta_bounds_constant(m, gamma, r, length, ka_left, ka_right)
    b0 = round_half_even(exact.beta0)
    b1 = round_half_even(b0 * (1.0 + length**2 * math.sqrt(m / r) * gamma)
                         + round_sig(length / (2.0 * r)) * (ka_left + ka_right))
    tab = LyapunovBounds(b0, b1, "constant-coefficient")
    return certificate(tab, lam, gamma, m, m)


@dataclass(frozen=True)
class TableRow:
    gamma: float
    ka_left: float
    ka_right: float
    beta0: float
    beta1: float
    lam: float
    M: float
    sigma: float
    beta1_general: float

    @property
    def beta1_gap(self):
        """General-formula beta1 minus constant-coefficient beta1 (the end-damper term)."""
        return self.beta1_general - self.beta1

    def values(self):
        return (self.beta0, self.beta1, self.M, self.sigma)


def table1(rows=REFERENCE_ROWS, precision="tabulated", lambda_policy="reference", m=None, r=None,
           length=None):
    """Decay-rate table over ``rows`` of ``(gamma, ka_left, ka_right, lam)``.

    ``precision="tabulated"`` reproduces the two-decimal hand computation from
    the printed line mass and rigidity; ``"exact"`` uses full floating point
    from the section data. ``lambda_policy="auto"`` replaces each row's
    ``lam`` by ``0.96 * lambda_max``.
    """
    from .model import REFERENCE_LENGTH, REFERENCE_PRINTED, REFERENCE_SECTION, derived_constant_params

    if precision not in ("tabulated", "exact"):
        raise DomainError(f"unknown precision {precision!r}")
    if lambda_policy not in ("reference", "auto"):
        raise DomainError(f"unknown lambda policy {lambda_policy!r}")
    length = REFERENCE_LENGTH if length is None else length
    if m is None or r is None:
        if precision == "tabulated":
            m, r = REFERENCE_PRINTED["m"], REFERENCE_PRINTED["r"]
        else:
            _, _, m, r = derived_constant_params(**REFERENCE_SECTION)
    out = []
    for gamma, kal, kar, lam in rows:
        bounds = beta_bounds_constant(m, gamma, r, length, kal, kar)
        if lambda_policy == "auto":
            lam = LAMBDA_FRACTION * lambda_range(bounds.beta0, gamma, m, m)[1]
        if precision == "tabulated":
            cert = tabulated_certificate(m, gamma, r, length, kal, kar, lam)
        else:
            cert = certificate(bounds, lam, gamma, m, m)
        general = beta_bounds_general(m, gamma * m, r, length, kal, kar)
        if precision == "tabulated":
            general = LyapunovBounds(general.beta0, round_half_even(general.beta1), general.variant)
        out.append(TableRow(gamma, kal, kar, cert.bounds.beta0, cert.bounds.beta1, cert.lam,
                            cert.M, cert.sigma, general.beta1))
    return out


def table_deviations(rows, reference=REFERENCE_VALUES, tol=0.005):
    """Cells differing from the reference by more than ``tol``: ``(row, column, got, expected)``."""
    names = ("beta0", "beta1", "M", "sigma")
    bad = []
    for i, (row, ref) in enumerate(zip(rows, reference)):
        for name, got, want in zip(names, row.values(), ref):
            if abs(got - want) > tol:
                bad.append((i, name, got, want))
    return bad
