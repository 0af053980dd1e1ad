"""
Transient Fickian moisture transport.

Backward Euler in conservative form:

    (M / dt + K) C_new = M / dt C_old + f

with ``M = int N N``, ``K = int D grad N . grad N`` and ``f`` the prescribed
boundary inflow. Capacity and diffusivity matrices are assembled once; the
constrained system is factorized once per ``(dt, Dirichlet set)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from src.geometry.elements import edge_shape_functions
from src.geometry.mesh import Mesh
from src.linalg import (
    Constraints,
    LinearSolver,
    SparseLinearSystem,
    apply_dirichlet,
    assemble_matrix,
    assemble_vector,
    select_solver,
)

logger = logging.getLogger(__name__)

_TIME_TOL = 1e-9
_MAX_CACHED_FACTORIZATIONS = 4


@dataclass(frozen=True, eq=False)
class ConcentrationField:
    """Nodal moisture mass fraction at time ``time`` (s)."""

    values: np.ndarray
    time: float = 0.0

    @classmethod
    def uniform(cls, n_nodes: int, value: float = 0.0, time: float = 0.0) -> "ConcentrationField":
        return cls(values=np.full(n_nodes, float(value)), time=time)


@dataclass(frozen=True)
class DirichletEntry:
    """Prescribed concentration on a node set over ``[start, end]`` (s)."""

    node_set: str
    value: float
    start: float = 0.0
    end: float = math.inf

    def active(self, t: float) -> bool:
        return self.start - _TIME_TOL <= t <= self.end + _TIME_TOL


@dataclass(frozen=True)
class FluxEntry:
    """Prescribed inflow (fraction mm/s, positive into the body) on a boundary side."""

    side: str
    inflow: float
    start: float = 0.0
    end: float = math.inf

    def active(self, t: float) -> bool:
        return self.start - _TIME_TOL <= t <= self.end + _TIME_TOL


@dataclass(frozen=True)
class MoistureBC:
    """Dirichlet and flux schedule of the moisture problem."""

    dirichlet: tuple[DirichletEntry, ...] = ()
    flux: tuple[FluxEntry, ...] = ()

    def constraints(self, mesh: Mesh, t: float) -> Constraints:
        """
        Active Dirichlet data at time ``t``.

        Raises:
            ConstraintError: When two active entries prescribe different values on one node.
        """
        entries = [(mesh.node_set(e.node_set), e.value) for e in self.dirichlet if e.active(t)]
        return Constraints.merge(*entries)

    def flux_vector(self, mesh: Mesh, t: float) -> np.ndarray:
        f = np.zeros(mesh.n_nodes)
        for entry in self.flux:
            if entry.active(t) and entry.inflow != 0.0:
                f += boundary_load(mesh, entry.side, entry.inflow)
        return f


def boundary_load(mesh: Mesh, side: str, value: float) -> np.ndarray:
    """Consistent nodal load ``int_side N value dS`` on straight boundary edges."""
    edges = mesh.edge_nodes(side)
    k = edges.shape[1]
    s, w = np.polynomial.legendre.leggauss(3)
    Ne = edge_shape_functions(k, s)  # (3, k)
    first, last = mesh.nodes[edges[:, 0]], mesh.nodes[edges[:, -1]]
    half_length = 0.5 * np.linalg.norm(last - first, axis=1)
    fe = value * half_length[:, None] * (w @ Ne)[None, :]
    return assemble_vector(edges, fe, mesh.n_nodes)


def hrz_lumped(element_mass: np.ndarray) -> np.ndarray:
    """Diagonal lumping scaled to keep each element's total capacity."""
    diag = np.einsum("eaa->ea", element_mass)
    scale = element_mass.sum(axis=(1, 2)) / diag.sum(axis=1)
    lumped = np.zeros_like(element_mass)
    idx = np.arange(element_mass.shape[1])
    lumped[:, idx, idx] = diag * scale[:, None]
    return lumped


class DiffusionSolver:
    """
    Backward-Euler moisture solver on a fixed mesh and diffusivity field.

    Args:
        mesh: Mesh to solve on.
        diffusivity: Quadrature-point diffusivity ``(E, q)`` or a scalar (mm^2/s).
        lumped_capacity: Use a row-lumped capacity matrix.
        solver: Linear solver backend.
    """

    def __init__(
        self,
        mesh: Mesh,
        diffusivity: np.ndarray | float,
        lumped_capacity: bool = False,
        solver: LinearSolver | None = None,
    ):
        D = np.broadcast_to(np.asarray(diffusivity, dtype=float), mesh.geometry.wdet.shape)
        if not np.all(D > 0):
            raise ValueError("Diffusivity must be positive at every quadrature point")
        geo = mesh.geometry
        me = geo.mass_matrices()
        if lumped_capacity:
            me = hrz_lumped(me)
        self.mesh = mesh
        self.capacity = assemble_matrix(mesh.elements, me, mesh.n_nodes)
        self.diffusivity = assemble_matrix(mesh.elements, geo.laplace_matrices(D), mesh.n_nodes)
        self.solver = solver or select_solver(mesh.n_nodes)
        self._factorizations: dict = {}

    def assemble(self, C_old: np.ndarray, dt: float, flux: np.ndarray | None = None) -> SparseLinearSystem:
        """Unconstrained backward-Euler system for one step of size ``dt``."""
        if not dt > 0:
            raise ValueError(f"Time step must be positive (got {dt})")
        matrix = (self.capacity / dt + self.diffusivity).tocsr()
        rhs = self.capacity @ np.asarray(C_old, dtype=float) / dt
        if flux is not None:
            rhs = rhs + flux
        return SparseLinearSystem(matrix=matrix, rhs=rhs, label="diffusion")

    def step(self, state: ConcentrationField, bc: MoistureBC, dt: float) -> ConcentrationField:
        """
        Advance ``state`` by ``dt`` with the boundary data active at ``t + dt``.

        Raises:
            SolverError: When the linear solve fails.
        """
        t_new = state.time + dt
        constraints = bc.constraints(self.mesh, t_new)
        system = self.assemble(state.values, dt, bc.flux_vector(self.mesh, t_new))
        if len(constraints) == 0 and not bc.flux:
            logger.debug("Pure-Neumann moisture step at t=%.6g s", t_new)
        system = apply_dirichlet(system, constraints)

        key = (float(dt), constraints.dofs.tobytes())
        factorization = self._factorizations.get(key)
        if factorization is None:
            if len(self._factorizations) >= _MAX_CACHED_FACTORIZATIONS:
                self._factorizations.clear()
            factorization = self.solver.factorize(system.matrix)
            self._factorizations[key] = factorization
        values = factorization(system.rhs)
        self.solver.check_residual(system, values)
        return ConcentrationField(values=values, time=t_new)

    def total_moisture(self, values: np.ndarray) -> float:
        """Moisture content ``1^T M C``, the quantity the scheme conserves."""
        return float(np.sum(self.capacity @ np.asarray(values, dtype=float)))


def assemble_diffusion(
    mesh: Mesh, diffusivity: np.ndarray | float, C_old: ConcentrationField, dt: float
) -> SparseLinearSystem:
    """Backward-Euler system ``(M/dt + K) C = M/dt C_old`` without boundary data."""
    return DiffusionSolver(mesh, diffusivity).assemble(C_old.values, dt)


def step_diffusion(
    mesh: Mesh,
    diffusivity: np.ndarray | float,
    state: ConcentrationField,
    bc: MoistureBC,
    dt: float,
) -> ConcentrationField:
    """One backward-Euler step; builds a throwaway :class:`DiffusionSolver`."""
    return DiffusionSolver(mesh, diffusivity).step(state, bc, dt)


def total_moisture(state: ConcentrationField, mesh: Mesh) -> float:
    """Quadrature-integrated moisture content ``int C dV`` (fraction mm^2)."""
    geo = mesh.geometry
    return geo.integrate(geo.interpolate(state.values))


def capacity_matrix(mesh: Mesh) -> sp.csr_matrix:
    return assemble_matrix(mesh.elements, mesh.geometry.mass_matrices(), mesh.n_nodes)
