"""Controlled Euler-Bernoulli beam: decay certificates and their numerical verification."""

from .discretization import DiscreteBeam, Mesh, assemble, interpolate_initial
from .energy import (EnergyLedger, auxiliary_J, build_ledger, certificate_check, energy, lyapunov_L,
                     measured_decay_rate)
from .model import (BeamSpec, BoundaryControls, CoefficientField, InitialConditions, Profile, ValidationReport,
                    coefficient_bounds, derived_constant_params, reference_beam, validate)
from .pipeline import SimulationResult, simulate
from .stability import (DecayCertificate, LyapunovBounds, beta_bounds_constant, beta_bounds_general, certificate,
                        certify, decay_envelope, lambda_range, table1)
from .timestepper import IntegratorConfig, Trajectory, integrate

__version__ = "0.1.0"
