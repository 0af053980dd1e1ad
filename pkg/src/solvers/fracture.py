"""
Displacement and phase-field sub-problems.

Displacement: ``int g(phi) B^T C (eps(u) - eps_m(C)) dV = 0`` with
``g = (1 - phi)^2 + kappa`` acting on the full stress. Phase field (AT2 with a
history field ``H``), linear in ``phi``:

    int (2H + Gc/l) N N phi + Gc l grad N . grad N phi dV = int 2H N dV
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from src.geometry.mesh import Mesh
from src.interface.indicator import PropertyFields
from src.linalg import (
    Constraints,
    LinearSolver,
    SolverError,
    SparseLinearSystem,
    apply_dirichlet,
    assemble_matrix,
    assemble_vector,
    select_solver,
)
from src.materials.catalog import MaterialCatalog
from src.materials.constitutive import (
    DEFAULT_KAPPA,
    ElasticParams,
    degradation,
    hygroscopic_strain_fields,
    plane_strain_stiffness,
    split_energy_isotropic,
    stress,
)

from .diffusion import hrz_lumped

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-8
NEWTON_MAX_ITER = 10
COMPONENTS = {"x": 0, "y": 1}


class NewtonError(RuntimeError):
    """Raised when the displacement Newton loop does not converge."""


@dataclass(frozen=True)
class MechanicalEntry:
    """Prescribed displacement ``value + rate * t`` of one component on a node set."""

    node_set: str
    component: str
    value: float = 0.0
    rate: float = 0.0

    def __post_init__(self):
        if self.component not in COMPONENTS:
            raise ValueError(f"Displacement component must be 'x' or 'y' (got '{self.component}')")

    def at(self, t: float) -> float:
        return self.value + self.rate * t


@dataclass(frozen=True)
class MechanicalBC:
    """Displacement constraints; ``t`` passed to :meth:`constraints` is stage-local."""

    entries: tuple[MechanicalEntry, ...] = ()

    def constraints(self, mesh: Mesh, t: float = 0.0) -> Constraints:
        items = []
        for entry in self.entries:
            nodes = mesh.node_set(entry.node_set)
            items.append((2 * nodes + COMPONENTS[entry.component], entry.at(t)))
        return Constraints.merge(*items)


@dataclass(frozen=True, eq=False)
class ElasticityMap:
    """Per-element plane-strain stiffness and the isotropic fit used by the energy split."""

    stiffness: np.ndarray  # (E, 3, 3)
    lam: np.ndarray  # (E,)
    mu: np.ndarray  # (E,)
    isotropic: np.ndarray  # (E,) bool
    theta: np.ndarray  # (E,) degrees

    @classmethod
    def from_catalog(cls, mesh: Mesh, catalog: MaterialCatalog) -> "ElasticityMap":
        n = mesh.n_elements
        stiffness = np.empty((n, 3, 3))
        lam, mu = np.empty(n), np.empty(n)
        iso = np.empty(n, dtype=bool)
        is_fibre = mesh.regions >= 0
        keys = np.column_stack([is_fibre.astype(float), mesh.orientations])
        unique, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        for k, (fibre_flag, theta) in enumerate(unique):
            material = catalog.material_for_region(0 if fibre_flag else -1)
            params = ElasticParams.from_material(material, float(theta))
            mask = inverse == k
            stiffness[mask] = plane_strain_stiffness(params)
            lam[mask], mu[mask] = params.lame
            iso[mask] = params.is_isotropic
        return cls(stiffness=stiffness, lam=lam, mu=mu, isotropic=iso, theta=mesh.orientations.copy())


class DisplacementProblem:
    """
    Hygro-elastic displacement sub-problem with degraded stiffness.

    Args:
        mesh: Mesh to solve on.
        elasticity: Per-element stiffness data.
        properties: Quadrature-point swelling coefficients.
        C0: Reference concentration of the eigenstrain.
        kappa: Residual stiffness fraction.
        solver: Linear solver backend.
    """

    def __init__(
        self,
        mesh: Mesh,
        elasticity: ElasticityMap,
        properties: PropertyFields,
        C0: float = 0.0,
        kappa: float = DEFAULT_KAPPA,
        solver: LinearSolver | None = None,
    ):
        self.mesh = mesh
        self.geo = mesh.geometry
        self.elasticity = elasticity
        self.properties = properties
        self.C0 = C0
        self.kappa = kappa
        self.n_dofs = 2 * mesh.n_nodes
        self.dofs = self.geo.vector_dofs()
        self.B = self.geo.strain_matrices()
        self.solver = solver or select_solver(self.n_dofs)

    def strain(self, u: np.ndarray) -> np.ndarray:
        """Total strain ``(E, q, 3)``."""
        return np.einsum("eqib,eb->eqi", self.B, np.asarray(u)[self.dofs])

    def eigenstrain(self, C: np.ndarray) -> np.ndarray:
        """Hygroscopic strain ``(E, q, 3)`` from the nodal concentration."""
        C_qp = self.geo.interpolate(C)
        theta = np.broadcast_to(self.elasticity.theta[:, None], C_qp.shape)
        return hygroscopic_strain_fields(
            C_qp, self.properties.alpha11, self.properties.alpha22, theta, self.C0
        )

    def elastic_strain(self, u: np.ndarray, C: np.ndarray) -> np.ndarray:
        return self.strain(u) - self.eigenstrain(C)

    def undamaged_stress(self, u: np.ndarray, C: np.ndarray) -> np.ndarray:
        return np.einsum("eij,eqj->eqi", self.elasticity.stiffness, self.elastic_strain(u, C))

    def degradation(self, phi: np.ndarray) -> np.ndarray:
        return degradation(self.geo.interpolate(phi), self.kappa)

    def stiffness(self, phi: np.ndarray) -> sp.csr_matrix:
        """``K = int g B^T C B dV``."""
        gw = self.degradation(phi) * self.geo.wdet
        ke = np.einsum("eq,eqia,eij,eqjb->eab", gw, self.B, self.elasticity.stiffness, self.B)
        return assemble_matrix(self.dofs, ke, self.n_dofs)

    def internal_force(self, u: np.ndarray, phi: np.ndarray, C: np.ndarray) -> np.ndarray:
        """Residual ``r = int g B^T sigma0 dV``."""
        gw = self.degradation(phi) * self.geo.wdet
        sigma0 = self.undamaged_stress(u, C)
        re = np.einsum("eq,eqia,eqi->ea", gw, self.B, sigma0)
        return assemble_vector(self.dofs, re, self.n_dofs)

    def assemble(self, u: np.ndarray, phi: np.ndarray, C: np.ndarray) -> SparseLinearSystem:
        """Newton system ``K du = -r`` at the current state (unconstrained)."""
        return SparseLinearSystem(
            matrix=self.stiffness(phi),
            rhs=-self.internal_force(u, phi, C),
            label="displacement",
        )

    def solve(
        self,
        u0: np.ndarray,
        phi: np.ndarray,
        C: np.ndarray,
        constraints: Constraints,
    ) -> np.ndarray:
        """
        Newton iteration to ``|r_free| <= tol * max(|r|, tiny)``.

        The problem is linear for fixed ``phi`` and ``C``, so one correction
        normally suffices.

        Raises:
            NewtonError: When the residual does not drop below tolerance.
            SolverError: When a linear solve fails.
        """
        u = np.array(u0, dtype=float)
        K = self.stiffness(phi)
        free = np.ones(self.n_dofs, dtype=bool)
        free[constraints.dofs] = False
        factorization = None
        for iteration in range(NEWTON_MAX_ITER):
            r = self.internal_force(u, phi, C)
            increment = constraints.values - u[constraints.dofs]
            r_free = float(np.linalg.norm(r[free]))
            scale = max(float(np.linalg.norm(r)), float(np.linalg.norm(K @ u)), 1e-300)
            if iteration > 0 and not np.any(increment) and r_free <= NEWTON_TOL * scale:
                logger.debug("Displacement converged in %d iterations (|r|=%.3e)", iteration, r_free)
                return u
            if iteration == 0 and not np.any(increment) and r_free == 0.0:
                return u
            system = apply_dirichlet(
                SparseLinearSystem(matrix=K, rhs=-r, label="displacement"),
                Constraints(dofs=constraints.dofs, values=increment),
            )
            if factorization is None:
                factorization = self.solver.factorize(system.matrix)
            du = factorization(system.rhs)
            self.solver.check_residual(system, du)
            u = u + du
        r = self.internal_force(u, phi, C)
        r_free = float(np.linalg.norm(r[free]))
        scale = max(float(np.linalg.norm(r)), float(np.linalg.norm(K @ u)), 1e-300)
        if r_free <= NEWTON_TOL * scale:
            return u
        raise NewtonError(
            f"Displacement Newton loop did not converge in {NEWTON_MAX_ITER} iterations "
            f"(residual {r_free:.3e}, scale {scale:.3e})"
        )

    def energy_split(self, u: np.ndarray, C: np.ndarray, mode: str = "bulk") -> tuple[np.ndarray, np.ndarray]:
        """Tensile and compressive energy densities ``(E, q)`` of the elastic strain."""
        eps = self.elastic_strain(u, C)
        lam = self.elasticity.lam[:, None]
        mu = self.elasticity.mu[:, None]
        psi_plus, psi_minus = split_energy_isotropic(eps, lam, mu, mode=mode)
        aniso = ~self.elasticity.isotropic
        if np.any(aniso):
            sig = np.einsum("eij,eqj->eqi", self.elasticity.stiffness[aniso], eps[aniso])
            psi0 = 0.5 * np.einsum("eqi,eqi->eq", eps[aniso], sig)
            psi_plus[aniso] = np.maximum(psi0 - psi_minus[aniso], 0.0)
        return psi_plus, psi_minus

    def degraded_stress(self, u: np.ndarray, phi: np.ndarray, C: np.ndarray) -> np.ndarray:
        """``g(phi) sigma0`` at the quadrature points, ``(E, q, 3)``."""
        return self.degradation(phi)[..., None] * self.undamaged_stress(u, C)

    def nodal_stress(self, u: np.ndarray, phi: np.ndarray, C: np.ndarray) -> np.ndarray:
        """Degraded stress averaged to the nodes, ``(n, 3)``."""
        per_element = self.degraded_stress(u, phi, C).mean(axis=1)
        n = self.mesh.n_nodes
        counts = np.bincount(self.mesh.elements.ravel(), minlength=n).astype(float)
        out = np.zeros((n, 3))
        for i in range(3):
            vals = np.repeat(per_element[:, i], self.mesh.nen)
            out[:, i] = np.bincount(self.mesh.elements.ravel(), weights=vals, minlength=n)
        return out / np.maximum(counts, 1.0)[:, None]

    def reaction_force(
        self, u: np.ndarray, phi: np.ndarray, C: np.ndarray, node_set: str, component: str = "y"
    ) -> float:
        """Sum of internal-force components over a node set (N per mm thickness)."""
        nodes = self.mesh.node_set(node_set)
        r = self.internal_force(u, phi, C)
        return float(np.sum(r[2 * nodes + COMPONENTS[component]]))


class PhaseFieldProblem:
    """AT2 damage sub-problem driven by the history field."""

    def __init__(
        self,
        mesh: Mesh,
        fracture_toughness: np.ndarray | float,
        length_scale: float,
        solver: LinearSolver | None = None,
    ):
        if not length_scale > 0:
            raise ValueError(f"Phase-field length scale must be positive (got {length_scale})")
        self.mesh = mesh
        self.geo = mesh.geometry
        self.Gc = np.broadcast_to(np.asarray(fracture_toughness, dtype=float), self.geo.wdet.shape)
        if not np.all(self.Gc > 0):
            raise ValueError("Fracture toughness must be positive at every quadrature point")
        self.length_scale = length_scale
        self.solver = solver or select_solver(mesh.n_nodes)
        self._laplace = self.geo.laplace_matrices(self.Gc * length_scale)

    def assemble(self, history: np.ndarray) -> SparseLinearSystem:
        """Reaction and source terms use the lumped mass; the gradient term stays consistent."""
        history = np.asarray(history, dtype=float)
        ke = hrz_lumped(self.geo.mass_matrices(2.0 * history + self.Gc / self.length_scale)) + self._laplace
        fe = np.einsum("eaa->ea", hrz_lumped(self.geo.mass_matrices(2.0 * history)))
        n = self.mesh.n_nodes
        return SparseLinearSystem(
            matrix=assemble_matrix(self.mesh.elements, ke, n),
            rhs=assemble_vector(self.mesh.elements, fe, n),
            label="phase-field",
        )

    def residual(self, phi: np.ndarray, history: np.ndarray) -> np.ndarray:
        """Weak residual of the damage equation at nodal ``phi``."""
        system = self.assemble(history)
        return system.matrix @ np.asarray(phi, dtype=float) - system.rhs

    def solve(self, history: np.ndarray, phi_old: np.ndarray | None = None) -> np.ndarray:
        """
        Solve for ``phi`` and project it onto ``[phi_old, 1]`` (``phi_old`` defaults to zero).

        Raises:
            SolverError: When the linear solve fails.
        """
        system = self.assemble(history)
        phi = self.solver.solve(system)
        if not np.all(np.isfinite(phi)):
            raise SolverError("Phase-field solve produced non-finite values")
        lower = np.zeros_like(phi) if phi_old is None else np.asarray(phi_old, dtype=float)
        healed = phi < lower
        if np.any(healed):
            logger.debug("Irreversibility clip on %d nodes", int(healed.sum()))
            phi = np.where(healed, lower, phi)
        over = phi > 1.0
        if np.any(over):
            logger.debug("Projected %d nodes onto phi = 1 (max %.6f)", int(over.sum()), float(phi.max()))
            phi = np.where(over, 1.0, phi)
        return phi


def crack_density(mesh: Mesh, phi: np.ndarray, length_scale: float) -> float:
    """Regularized crack length ``int phi^2/(2l) + l/2 |grad phi|^2 dV``."""
    geo = mesh.geometry
    val = geo.interpolate(phi)
    grad = geo.gradient(phi)
    density = val**2 / (2.0 * length_scale) + 0.5 * length_scale * np.sum(grad**2, axis=-1)
    return geo.integrate(density)


def assemble_displacement(
    mesh: Mesh,
    u: np.ndarray,
    phi: np.ndarray,
    C: np.ndarray,
    elasticity: ElasticityMap,
    properties: PropertyFields,
    C0: float = 0.0,
    kappa: float = DEFAULT_KAPPA,
) -> SparseLinearSystem:
    return DisplacementProblem(mesh, elasticity, properties, C0=C0, kappa=kappa).assemble(u, phi, C)


def assemble_phase_field(
    mesh: Mesh, history: np.ndarray, fracture_toughness: np.ndarray | float, length_scale: float
) -> SparseLinearSystem:
    return PhaseFieldProblem(mesh, fracture_toughness, length_scale).assemble(history)


def solve_displacement(
    problem: DisplacementProblem,
    bc: MechanicalBC,
    phi: np.ndarray,
    C: np.ndarray,
    u0: np.ndarray | None = None,
    t: float = 0.0,
) -> np.ndarray:
    u0 = np.zeros(problem.n_dofs) if u0 is None else u0
    return problem.solve(u0, phi, C, bc.constraints(problem.mesh, t))


def reaction_force(
    problem: DisplacementProblem,
    u: np.ndarray,
    phi: np.ndarray,
    C: np.ndarray,
    node_set: str,
    component: str = "y",
) -> float:
    return problem.reaction_force(u, phi, C, node_set, component)
