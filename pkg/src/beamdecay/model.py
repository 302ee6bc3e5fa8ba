"""Continuous problem data: coefficient fields, beam, boundary controls, initial state.

Everything here is immutable. ``validate`` returns violations as data rather
than raising, so callers can print the full list at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError

# identifiers used in ValidationReport.violations
LENGTH_NOT_POSITIVE = "LENGTH_NOT_POSITIVE"
COEFFICIENT_DOMAIN = "COEFFICIENT_DOMAIN"
MASS_NOT_POSITIVE = "MASS_NOT_POSITIVE"
RIGIDITY_NOT_POSITIVE = "RIGIDITY_NOT_POSITIVE"
DAMPING_NEGATIVE = "DAMPING_NEGATIVE"
GAMMA_NEGATIVE = "GAMMA_NEGATIVE"
DAMPING_NOT_PROPORTIONAL = "DAMPING_NOT_PROPORTIONAL"
BOUNDARY_CONSTANT_NEGATIVE = "BOUNDARY_CONSTANT_NEGATIVE"
NO_DAMPING_OR_SPRING = "NO_DAMPING_OR_SPRING"
INITIAL_DEFLECTION_NONZERO_AT_END = "INITIAL_DEFLECTION_NONZERO_AT_END"
INITIAL_CONDITION_NOT_FINITE = "INITIAL_CONDITION_NOT_FINITE"

PROPORTIONALITY_RTOL = 1e-12


@dataclass(frozen=True)
class CoefficientField:
    """A positive coefficient on [0, l].

    ``constant``: one value. ``piecewise``: ``values[i]`` on
    ``[breakpoints[i], breakpoints[i+1])``, the last piece closed on the right.
    ``sampled``: values at ``breakpoints`` (a uniform grid), linear in between.
    """

    kind: str
    values: tuple
    breakpoints: tuple = ()

    def __post_init__(self):
        vals = tuple(float(v) for v in np.atleast_1d(self.values))
        bps = tuple(float(b) for b in np.atleast_1d(self.breakpoints)) if len(self.breakpoints) else ()
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "breakpoints", bps)
        if self.kind not in ("constant", "piecewise", "sampled"):
            raise DomainError(f"unknown coefficient kind {self.kind!r}")
        if not all(math.isfinite(v) for v in vals) or not all(math.isfinite(b) for b in bps):
            raise DomainError("coefficient values and breakpoints must be finite")
        if self.kind == "constant":
            if len(vals) != 1:
                raise DomainError("constant field takes exactly one value")
            return
        if len(bps) < 2 or any(b1 <= b0 for b0, b1 in zip(bps, bps[1:])):
            raise DomainError("breakpoints must be strictly increasing")
        if bps[0] < 0.0:
            raise DomainError("breakpoints must lie in [0, l]")
        if self.kind == "piecewise" and len(vals) != len(bps) - 1:
            raise DomainError("piecewise field needs len(breakpoints) - 1 values")
        if self.kind == "sampled":
            if len(vals) != len(bps):
                raise DomainError("sampled field needs one value per grid point")
            steps = np.diff(bps)
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
                raise DomainError("sampled field requires a uniform grid")

    @classmethod
    def constant(cls, value):
        return cls("constant", (value,))

    @classmethod
    def piecewise(cls, breakpoints, values):
        return cls("piecewise", tuple(values), tuple(breakpoints))

    @classmethod
    def sampled(cls, values, length):
        values = tuple(values)
        return cls("sampled", values, tuple(np.linspace(0.0, length, len(values))))

    @property
    def is_piecewise_constant(self):
        return self.kind in ("constant", "piecewise")

    def covers(self, length):
        if self.kind == "constant":
            return True
        tol = 1e-12 * max(1.0, length)
        return self.breakpoints[0] <= tol and self.breakpoints[-1] >= length - tol

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full_like(x, self.values[0])
        if self.kind == "sampled":
            return np.interp(x, self.breakpoints, self.values)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        return np.asarray(self.values)[idx]

    def scaled(self, factor):
        return CoefficientField(self.kind, tuple(factor * v for v in self.values), self.breakpoints)


def coefficient_bounds(field: CoefficientField, length: float) -> tuple[float, float]:
    """Return ``(inf, sup)`` of ``field`` over [0, length].

    Exact for every supported kind: piecewise fields take their extrema on the
    pieces that meet [0, length], sampled fields at the samples.
    """
    if not length > 0:
        raise DomainError("length must be positive")
    if not field.covers(length):
        raise DomainError("field is undefined on part of [0, l]")
    if field.kind == "constant":
        return field.values[0], field.values[0]
    bps = np.asarray(field.breakpoints)
    vals = np.asarray(field.values)
    if field.kind == "piecewise":
        sel = vals[bps[:-1] < length]
    else:
        # linear interpolation: extrema sit at samples, or at l if the grid overshoots
        sel = np.append(vals[bps <= length], field(length))
    return float(sel.min()), float(sel.max())


@dataclass(frozen=True)
class BeamSpec:
    length: float
    mass: CoefficientField
    damping: CoefficientField
    rigidity: CoefficientField
    gamma: float = 0.0

    @classmethod
    def proportional(cls, length, mass, rigidity, gamma):
        """Beam with viscous damping ``gamma * mass``; scalars become constant fields."""
        if not isinstance(mass, CoefficientField):
            mass = CoefficientField.constant(mass)
        if not isinstance(rigidity, CoefficientField):
            rigidity = CoefficientField.constant(rigidity)
        return cls(float(length), mass, mass.scaled(gamma), rigidity, float(gamma))

    @property
    def is_constant(self):
        return all(f.kind == "constant" for f in (self.mass, self.damping, self.rigidity))

    def with_gamma(self, gamma):
        return BeamSpec(self.length, self.mass, self.mass.scaled(gamma), self.rigidity, float(gamma))

    def bounds(self):
        """Dict with m0, m1, mu0, mu1, r0, r1."""
        m0, m1 = coefficient_bounds(self.mass, self.length)
        mu0, mu1 = coefficient_bounds(self.damping, self.length)
        r0, r1 = coefficient_bounds(self.rigidity, self.length)
        return dict(m0=m0, m1=m1, mu0=mu0, mu1=mu1, r0=r0, r1=r1)


@dataclass(frozen=True)
class BoundaryControls:
    """Torsional springs (``kr_*``, N m) and dampers (``ka_*``, N m s) at the two ends."""

    kr_left: float = 0.0
    ka_left: float = 0.0
    kr_right: float = 0.0
    ka_right: float = 0.0

    def as_tuple(self):
        return (self.kr_left, self.ka_left, self.kr_right, self.ka_right)


@dataclass(frozen=True)
class Profile:
    """A deflection or velocity profile on [0, l].

    Closed-form kinds: ``zero``, ``quartic`` (``A x^2 (l-x)^2 / l^4``),
    ``sine`` (``A sin(k pi x / l)``), ``polynomial`` (``coeffs`` in increasing
    powers of x). ``sampled`` holds values on a uniform grid spanning [0, l].
    """

    kind: str = "zero"
    amplitude: float = 0.0
    mode: int = 1
    coeffs: tuple = ()
    samples: tuple = ()

    @classmethod
    def demo(cls, amplitude=0.01):
        """Default simulation start: first hinged mode shape.

        Zero end moments make it compatible with unloaded springs, so the modal
        energy is confined to low frequencies; the end slopes are nonzero.
        """
        return cls.sine(amplitude, 1)

    @classmethod
    def quartic(cls, amplitude=0.01):
        return cls("quartic", amplitude=amplitude)

    @classmethod
    def sine(cls, amplitude, mode=1):
        return cls("sine", amplitude=amplitude, mode=mode)

    @classmethod
    def polynomial(cls, coeffs):
        return cls("polynomial", coeffs=tuple(float(c) for c in coeffs))

    @classmethod
    def sampled(cls, values):
        return cls("sampled", samples=tuple(float(v) for v in values))

    @property
    def closed_form(self):
        return self.kind != "sampled"

    def grid(self, length):
        return np.linspace(0.0, length, len(self.samples))

    def value(self, x, length):
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "quartic":
            return self.amplitude * x**2 * (length - x) ** 2 / length**4
        if self.kind == "sine":
            return self.amplitude * np.sin(self.mode * np.pi * x / length)
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(x, self.coeffs)
        if self.kind == "sampled":
            return np.interp(x, self.grid(length), self.samples)
        raise DomainError(f"unknown profile kind {self.kind!r}")

    def slope(self, x, length):
        """Exact derivative for closed-form kinds; central differences for samples."""
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "quartic":
            return self.amplitude * 2 * x * (length - x) * (length - 2 * x) / length**4
        if self.kind == "sine":
            k = self.mode * np.pi / length
            return self.amplitude * k * np.cos(k * x)
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(self.coeffs))
        if self.kind == "sampled":
            grid = self.grid(length)
            return np.interp(x, grid, np.gradient(np.asarray(self.samples), grid, edge_order=2))
        raise DomainError(f"unknown profile kind {self.kind!r}")


@dataclass(frozen=True)
class InitialConditions:
    u0: Profile = field(default_factory=Profile)
    u1: Profile = field(default_factory=Profile)

    @classmethod
    def demo(cls, amplitude=0.01):
        return cls(Profile.demo(amplitude), Profile())


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()
    certificate_eligible: bool = False

    @property
    def ok(self):
        return not self.violations

    def __str__(self):
        head = "valid" if self.ok else "invalid: " + ", ".join(self.violations)
        return f"{head}; certificate eligible: {'yes' if self.certificate_eligible else 'no (gamma must be > 0)'}"


def _field_violations(fld, length, positive, code_low):
    try:
        lo, _ = coefficient_bounds(fld, length)
    except DomainError:
        return [COEFFICIENT_DOMAIN]
    if (positive and not lo > 0) or (not positive and lo < 0):
        return [code_low]
    return []


def validate(spec: BeamSpec, bc: BoundaryControls, ic: InitialConditions | None = None) -> ValidationReport:
    out = []
    if not (math.isfinite(spec.length) and spec.length > 0):
        return ValidationReport((LENGTH_NOT_POSITIVE,), False)
    length = spec.length
    out += _field_violations(spec.mass, length, True, MASS_NOT_POSITIVE)
    out += _field_violations(spec.rigidity, length, True, RIGIDITY_NOT_POSITIVE)
    out += _field_violations(spec.damping, length, False, DAMPING_NEGATIVE)
    if not (math.isfinite(spec.gamma) and spec.gamma >= 0):
        out.append(GAMMA_NEGATIVE)
    elif spec.gamma > 0 and COEFFICIENT_DOMAIN not in out:
        xs = _probe_points(spec, length)
        mu, gm = spec.damping(xs), spec.gamma * spec.mass(xs)
        if not np.allclose(mu, gm, rtol=PROPORTIONALITY_RTOL, atol=0.0):
            out.append(DAMPING_NOT_PROPORTIONAL)
    ks = bc.as_tuple()
    if any(not (math.isfinite(k) and k >= 0) for k in ks):
        out.append(BOUNDARY_CONSTANT_NEGATIVE)
    elif not (max(spec.gamma, 0.0) + sum(ks) > 0):
        out.append(NO_DAMPING_OR_SPRING)
    if ic is not None:
        out += _ic_violations(ic, length)
    eligible = not out and spec.gamma > 0
    return ValidationReport(tuple(dict.fromkeys(out)), eligible)


def _probe_points(spec, length):
    pts = [np.linspace(0.0, length, 257)]
    for f in (spec.mass, spec.damping):
        if f.breakpoints:
            pts.append(np.clip(np.asarray(f.breakpoints), 0.0, length))
    return np.unique(np.concatenate(pts))


def _ic_violations(ic, length):
    out = []
    for prof in (ic.u0, ic.u1):
        vals = np.asarray(prof.samples if prof.kind == "sampled" else prof.value(np.linspace(0, length, 65), length))
        if not np.all(np.isfinite(vals)) or (prof.kind == "polynomial" and not np.all(np.isfinite(prof.coeffs))):
            out.append(INITIAL_CONDITION_NOT_FINITE)
    u0 = ic.u0
    if u0.kind == "sampled":
        ends = (u0.samples[0], u0.samples[-1]) if u0.samples else (0.0, 0.0)
    elif u0.kind == "polynomial":
        ends = (u0.value(0.0, length), u0.value(length, length))
        # exact zero is unattainable in floating point for general polynomials
        scale = max(1.0, float(np.abs(u0.value(np.linspace(0, length, 65), length)).max()))
        ends = tuple(0.0 if abs(e) <= 1e-13 * scale else e for e in ends)
    elif u0.kind == "sine":
        ends = (0.0, 0.0)
    else:
        ends = (float(u0.value(0.0, length)), float(u0.value(length, length)))
    if any(e != 0.0 for e in ends):
        out.append(INITIAL_DEFLECTION_NONZERO_AT_END)
    return out


def derived_constant_params(rho, E, b, h):
    """Section area, second moment, line mass and rigidity of a solid ``b x h`` rectangle.

    Returns ``(S, I, m, r)`` with ``S = b h``, ``I = b h^3 / 12``, ``m = rho S``, ``r = E I``.
    """
    for name, v in (("rho", rho), ("E", E), ("b", b), ("h", h)):
        if not (math.isfinite(v) and v > 0):
            raise DomainError(f"{name} must be positive, got {v!r}")
    S = b * h
    I = b * h**3 / 12.0
    return S, I, rho * S, E * I


# Reference strip (polymer, rectangular section) used throughout the decay-rate tables.
REFERENCE_SECTION = dict(rho=1.42e3, E=3.1e9, b=1.7e-3, h=0.89e-3)
REFERENCE_LENGTH = 0.502
# line mass and rigidity as printed (three significant figures) next to the table
REFERENCE_PRINTED = dict(m=2.14e-3, r=0.31e-3)


def reference_beam(gamma=0.1, printed=False):
    """Constant-coefficient reference strip, from the section data or its printed m, r."""
    if printed:
        m, r = REFERENCE_PRINTED["m"], REFERENCE_PRINTED["r"]
    else:
        _, _, m, r = derived_constant_params(**REFERENCE_SECTION)
    return BeamSpec.proportional(REFERENCE_LENGTH, m, r, gamma)


# ---------------------------------------------------------------------------
# configuration schema (JSON-compatible mapping)


def _field_from_config(value, length, name):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return CoefficientField.constant(float(value))
    if isinstance(value, Mapping):
        if "breakpoints" in value:
            return CoefficientField.piecewise(value["breakpoints"], value["values"])
        if "values" in value:
            return CoefficientField.sampled(value["values"], length)
    raise DomainError(f"field {name!r}: expected a number or {{breakpoints, values}}")


def _profile_from_config(value, name):
    if value is None or value == 0 or value == "zero":
        return Profile()
    if value == "demo":
        return Profile.demo()
    if isinstance(value, Mapping):
        kind = value.get("kind", "sampled" if "values" in value else None)
        if kind == "demo":
            return Profile.demo(float(value.get("amplitude", 0.01)))
        if kind == "quartic":
            return Profile.quartic(float(value.get("amplitude", 0.01)))
        if kind == "sine":
            return Profile.sine(float(value.get("amplitude", 0.01)), int(value.get("mode", 1)))
        if kind == "polynomial":
            return Profile.polynomial(value["coeffs"])
        if kind == "sampled":
            return Profile.sampled(value["values"])
        if kind == "zero":
            return Profile()
    if isinstance(value, (list, tuple)):
        return Profile.sampled(value)
    raise DomainError(f"initial condition {name!r} not understood: {value!r}")


def from_config(cfg: Mapping):
    """Build ``(BeamSpec, BoundaryControls, InitialConditions)`` from a config mapping.

    Either ``m`` and ``r`` or a ``section`` block ``{rho, E, b, h}`` must be
    present. ``mu`` defaults to ``gamma * m``. Structural problems raise
    DomainError; physical admissibility is left to ``validate``.
    """
    try:
        length = float(cfg["length"])
        gamma = float(cfg.get("gamma", 0.0))
        if "section" in cfg:
            sec = cfg["section"]
            _, _, m_val, r_val = derived_constant_params(
                float(sec["rho"]), float(sec["E"]), float(sec["b"]), float(sec["h"]))
            cfg = {"m": m_val, "r": r_val, **cfg}
        mass = _field_from_config(cfg["m"], length, "m")
        rig = _field_from_config(cfg["r"], length, "r")
        mu = _field_from_config(cfg["mu"], length, "mu") if cfg.get("mu") is not None else mass.scaled(gamma)
        bc = BoundaryControls(*(float(cfg.get(k, 0.0)) for k in ("kr_left", "ka_left", "kr_right", "ka_right")))
        ic = InitialConditions(_profile_from_config(cfg.get("u0", "demo"), "u0"),
                               _profile_from_config(cfg.get("u1", 0), "u1"))
    except KeyError as exc:
        raise DomainError(f"missing config key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed config: {exc}") from None
    return BeamSpec(length, mass, mu, rig, gamma), bc, ic
