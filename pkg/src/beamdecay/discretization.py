"""Hermite-cubic finite elements for the controlled beam.

Each node carries a deflection and a rotation. Deflections at both ends are
eliminated (hinged ends); the end rotations stay as unknowns so the torsional
springs and dampers enter as exact rank-one updates on two diagonal entries.

Unknown ordering is node-major: ``theta_0, w_1, theta_1, ..., w_{n-1},
theta_{n-1}, theta_n``. Elements only couple neighbouring nodes, so every
matrix has half-bandwidth 3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MeshIncompatible, PreconditionViolation, ResolutionError
from .model import BeamSpec, BoundaryControls, CoefficientField, InitialConditions

HALF_BANDWIDTH = 3
# 4-point Gauss integrates the degree-7 mass integrand of a linearly varying coefficient exactly
_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(4)


@dataclass(frozen=True)
class Mesh:
    length: float
    n_elements: int

    def __post_init__(self):
        if int(self.n_elements) != self.n_elements or self.n_elements < 1:
            raise PreconditionViolation("n_elements must be a positive integer")
        if not self.length > 0:
            raise PreconditionViolation("mesh length must be positive")

    @classmethod
    def uniform(cls, length, n_elements):
        return cls(float(length), int(n_elements))

    @property
    def h(self):
        return self.length / self.n_elements

    @property
    def node_positions(self):
        return np.linspace(0.0, self.length, self.n_elements + 1)


def hermite_basis(xi, h):
    """Shape functions and their first and second x-derivatives at local coordinates ``xi`` in [0, 1]."""
    xi = np.asarray(xi, dtype=float)
    N = np.stack([1 - 3 * xi**2 + 2 * xi**3,
                  h * (xi - 2 * xi**2 + xi**3),
                  3 * xi**2 - 2 * xi**3,
                  h * (-xi**2 + xi**3)])
    dN = np.stack([(-6 * xi + 6 * xi**2) / h,
                   1 - 4 * xi + 3 * xi**2,
                   (6 * xi - 6 * xi**2) / h,
                   -2 * xi + 3 * xi**2])
    d2N = np.stack([(-6 + 12 * xi) / h**2,
                    (-4 + 6 * xi) / h,
                    (6 - 12 * xi) / h**2,
                    (-2 + 6 * xi) / h])
    return N, dN, d2N


def element_mass(value, h):
    return value * h / 420.0 * np.array([
        [156.0, 22 * h, 54.0, -13 * h],
        [22 * h, 4 * h * h, 13 * h, -3 * h * h],
        [54.0, 13 * h, 156.0, -22 * h],
        [-13 * h, -3 * h * h, -22 * h, 4 * h * h]])


def element_stiffness(value, h):
    return value / h**3 * np.array([
        [12.0, 6 * h, -12.0, 6 * h],
        [6 * h, 4 * h * h, -6 * h, 2 * h * h],
        [-12.0, -6 * h, 12.0, -6 * h],
        [6 * h, 2 * h * h, -6 * h, 4 * h * h]])


def _gauss_element(fld, x0, h, second):
    xi = 0.5 * (_GAUSS_X + 1.0)
    w = 0.5 * h * _GAUSS_W
    N, _, d2N = hermite_basis(xi, h)
    B = d2N if second else N
    return (B * (w * fld(x0 + h * xi))) @ B.T


def _element_values(fld: CoefficientField, mesh: Mesh):
    """Per-element constant values, or None when the field needs quadrature."""
    n = mesh.n_elements
    if fld.kind == "constant":
        return np.full(n, fld.values[0])
    if fld.kind == "sampled":
        return None
    nodes = mesh.node_positions
    tol = 1e-9 * mesh.h
    for b in fld.breakpoints:
        if 0.0 < b < mesh.length and np.min(np.abs(nodes - b)) > tol:
            raise MeshIncompatible(f"breakpoint {b} does not fall on a node of the {n}-element mesh")
    return fld(nodes[:-1] + 0.5 * mesh.h)


def _assemble_field(fld, mesh, second):
    n, h = mesh.n_elements, mesh.h
    full = np.zeros((2 * (n + 1), 2 * (n + 1)))
    vals = _element_values(fld, mesh)
    x0s = mesh.node_positions[:-1]
    for e in range(n):
        if vals is not None:
            ke = element_stiffness(vals[e], h) if second else element_mass(vals[e], h)
        else:
            ke = _gauss_element(fld, x0s[e], h, second)
        sl = slice(2 * e, 2 * e + 4)
        full[sl, sl] += ke
    return full


def _free_dofs(n):
    # full layout (w_0, theta_0, ..., w_n, theta_n); drop w_0 and w_n
    return np.r_[1:2 * n, 2 * n + 1]


@dataclass(frozen=True, eq=False)
class DiscreteBeam:
    """Assembled operators for ``M q'' + C q' + K q = 0``.

    ``stiffness = bending + springs`` and ``damping = viscous + dampers``,
    the boundary parts sitting on ``left_rotation`` and ``right_rotation``.
    """

    mesh: Mesh
    mass: np.ndarray
    damping: np.ndarray
    stiffness: np.ndarray
    bending: np.ndarray
    viscous: np.ndarray
    bc: BoundaryControls
    left_rotation: int
    right_rotation: int
    dof_map: dict

    @property
    def n_dofs(self):
        return self.mass.shape[0]

    @property
    def deflection_indices(self):
        """Unknown indices of the interior-node deflections, in node order."""
        return np.array([self.dof_map[(i, "w")] for i in range(1, self.mesh.n_elements)], dtype=int)

    @property
    def rotation_indices(self):
        return np.array([self.dof_map[(i, "theta")] for i in range(self.mesh.n_elements + 1)], dtype=int)

    def nodal_values(self, q):
        """Deflection and rotation at every node, end deflections filled with zeros."""
        n = self.mesh.n_elements
        w = np.zeros(n + 1)
        w[1:n] = q[self.deflection_indices]
        return w, q[self.rotation_indices]

    def banded(self, matrix):
        """Upper banded storage for ``scipy.linalg.cholesky_banded``."""
        return to_upper_banded(matrix, HALF_BANDWIDTH)


def to_upper_banded(a, u):
    n = a.shape[0]
    ab = np.zeros((u + 1, n))
    for k in range(u + 1):
        ab[u - k, k:] = np.diagonal(a, k)
    return ab


def assemble(spec: BeamSpec, bc: BoundaryControls, mesh: Mesh) -> DiscreteBeam:
    if mesh.n_elements < 2:
        raise PreconditionViolation("assembly needs at least 2 elements")
    if abs(mesh.length - spec.length) > 1e-12 * spec.length:
        raise PreconditionViolation("mesh length differs from beam length")
    n = mesh.n_elements
    keep = _free_dofs(n)
    pick = np.ix_(keep, keep)
    M = _assemble_field(spec.mass, mesh, second=False)[pick]
    Kb = _assemble_field(spec.rigidity, mesh, second=True)[pick]
    Cv = _assemble_field(spec.damping, mesh, second=False)[pick]
    left, right = 0, keep.size - 1

    K = Kb.copy()
    K[left, left] += bc.kr_left
    K[right, right] += bc.kr_right
    C = Cv.copy()
    C[left, left] += bc.ka_left
    C[right, right] += bc.ka_right

    dof_map = {}
    for idx, full in enumerate(keep):
        dof_map[(int(full // 2), "w" if full % 2 == 0 else "theta")] = idx
    arrays = [M, C, K, Kb, Cv]
    for a in arrays:
        a.setflags(write=False)
    return DiscreteBeam(mesh, M, C, K, Kb, Cv, bc, left, right, dof_map)


def interpolate_initial(ic: InitialConditions, mesh):
    """Nodal interpolant ``(q0, v0)`` of the initial deflection and velocity.

    Closed-form profiles use exact slopes; sampled ones use second-order
    differences, and must be at least as fine as the mesh.
    """
    if isinstance(mesh, DiscreteBeam):
        mesh = mesh.mesh
    length = mesh.length
    n = mesh.n_elements
    x = mesh.node_positions
    out = []
    for prof in (ic.u0, ic.u1):
        if prof.kind == "sampled" and len(prof.samples) - 1 < n:
            raise ResolutionError(f"{len(prof.samples)} samples cannot resolve {n} elements")
        full = np.empty(2 * (n + 1))
        full[0::2] = prof.value(x, length)
        full[1::2] = prof.slope(x, length)
        out.append(full[_free_dofs(n)])
    return out[0], out[1]


def interpolant_coefficients(value, slope, mesh):
    """Constrained unknown vector of the Hermite interpolant of callables ``value``, ``slope``."""
    x = mesh.node_positions
    full = np.empty(2 * (mesh.n_elements + 1))
    full[0::2] = value(x)
    full[1::2] = slope(x)
    return full[_free_dofs(mesh.n_elements)]


def evaluate(beam: DiscreteBeam, q, x, derivative=0):
    """Value (or first/second derivative) of the finite-element function ``q`` at points ``x``."""
    mesh = beam.mesh
    w, th = beam.nodal_values(np.asarray(q, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    e = np.clip((x // mesh.h).astype(int), 0, mesh.n_elements - 1)
    xi = (x - e * mesh.h) / mesh.h
    basis = hermite_basis(xi, mesh.h)[derivative]
    coef = np.stack([w[e], th[e], w[e + 1], th[e + 1]])
    return np.sum(basis * coef, axis=0)


def dump_coo(matrix, path):
    """Write nonzeros as ``row col value`` lines (0-based indices, 17 significant digits)."""
    rows, cols = np.nonzero(matrix)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, j in zip(rows, cols):
            fh.write(f"{i} {j} {matrix[i, j]:.17g}\n")
