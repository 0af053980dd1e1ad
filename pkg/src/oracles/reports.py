"""
Verification runs that pit the finite-element solvers against the analytic
references, each producing a machine-readable :class:`OracleReport`.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace
from typing import Callable, Dict

import numpy as np

from src.geometry import Domain2D, build_rect_mesh
from src.interface.indicator import IndicatorField, build_property_fields, solve_indicator
from src.linalg import Constraints
from src.materials.catalog import FLAX_EPOXY, FLAX_EPOXY_SATURATION, MaterialCatalog
from src.solvers.diffusion import ConcentrationField, DiffusionSolver, DirichletEntry, MoistureBC
from src.solvers.fracture import DisplacementProblem, ElasticityMap, PhaseFieldProblem

from .analytic import (
    at2_homogeneous,
    fd_jacobian_check,
    free_swelling_elongation,
    screened_poisson_decay,
    slab_diffusion_series,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one verification run; ``passed`` iff ``metric <= threshold``."""

    name: str
    metric: float
    threshold: float
    passed: bool
    runtime: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} {self.metric:.3e} {self.threshold:.1e}"


def _report(name: str, metric: float, threshold: float, started: float) -> OracleReport:
    report = OracleReport(
        name=name,
        metric=float(metric),
        threshold=threshold,
        passed=bool(metric <= threshold),
        runtime=time.perf_counter() - started,
    )
    logger.info("Oracle %s", report.line())
    return report


def matrix_only_catalog() -> MaterialCatalog:
    """Flax-epoxy catalog without fibres, for homogeneous checks."""
    return MaterialCatalog(name="epoxy-only", matrix=FLAX_EPOXY.matrix, interface=FLAX_EPOXY.interface)


def check_slab_diffusion(
    length: float = 1.0,
    diffusivity: float = 1.45e-6,
    c_surface: float = FLAX_EPOXY_SATURATION,
    fourier: float = 0.2,
    elements: int = 100,
    steps: int = 200,
    threshold: float = 0.01,
) -> OracleReport:
    """Relative L2 nodal error of a wetted strip against the slab series."""
    started = time.perf_counter()
    h = length / elements
    mesh = build_rect_mesh(Domain2D(length, h), h)
    solver = DiffusionSolver(mesh, diffusivity)
    bc = MoistureBC(dirichlet=(DirichletEntry("left", c_surface),))
    t_end = fourier * length**2 / diffusivity
    dt = t_end / steps
    state = ConcentrationField.uniform(mesh.n_nodes, 0.0)
    for _ in range(steps):
        state = solver.step(state, bc, dt)
    exact = slab_diffusion_series(mesh.nodes[:, 0], state.time, diffusivity, c_surface, length)
    error = np.linalg.norm(state.values - exact) / np.linalg.norm(exact)
    return _report("slab-diffusion", error, threshold, started)


def check_screened_poisson(
    length_scale: float = 1.0, span: float = 10.0, refinement: int = 10, threshold: float = 0.02
) -> OracleReport:
    """Indicator on a long strip seeded at its left edge versus ``exp(-x/l)``."""
    started = time.perf_counter()
    h = length_scale / refinement
    mesh = build_rect_mesh(Domain2D(span * length_scale, h), h)
    field = solve_indicator(mesh, mesh.node_set("left"), length_scale)
    exact = screened_poisson_decay(mesh.nodes[:, 0] - mesh.domain.x_min, length_scale)
    return _report("screened-poisson", np.max(np.abs(field.values - exact)), threshold, started)


def check_at2_homogeneous(length_scale: float = 0.001, threshold: float = 1e-6) -> OracleReport:
    """Uniform history on a small patch gives the closed-form uniform damage."""
    started = time.perf_counter()
    mesh = build_rect_mesh(Domain2D(4 * length_scale, 4 * length_scale), length_scale)
    gc = FLAX_EPOXY.matrix.fracture_toughness
    problem = PhaseFieldProblem(mesh, gc, length_scale)
    worst = 0.0
    for level in (0.0, gc / (4 * length_scale), gc / (2 * length_scale), 2 * gc / length_scale):
        history = np.full(mesh.geometry.wdet.shape, level)
        phi = problem.solve(history)
        worst = max(worst, float(np.max(np.abs(phi - at2_homogeneous(level, gc, length_scale)))))
    return _report("at2-homogeneous", worst, threshold, started)


def check_jacobians(draws: int = 100, seed: int = 0, threshold: float = 1e-6) -> OracleReport:
    """Finite-difference Jacobians of the three sub-problems on random single-element states."""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    catalog = FLAX_EPOXY
    worst = 0.0
    for _ in range(draws):
        size = rng.uniform(0.5, 2.0) * 1e-3
        mesh = build_rect_mesh(Domain2D(size, size), size)
        # skew the element to exercise a non-affine Jacobian
        mesh = replace(
            mesh,
            nodes=mesh.nodes + rng.uniform(-0.1, 0.1, mesh.nodes.shape) * size,
            regions=np.array([int(rng.integers(-1, 1))]),
            orientations=np.array([rng.uniform(0.0, 180.0)]),
        )
        indicator = IndicatorField(values=rng.uniform(0.0, 1.0, mesh.n_nodes), length_scale=size)
        props = build_property_fields(indicator, mesh, catalog)

        diffusion = DiffusionSolver(mesh, props.diffusivity)
        dt = rng.uniform(1.0, 100.0)
        c_old = rng.uniform(0.0, 0.08, mesh.n_nodes)
        system = diffusion.assemble(c_old, dt)
        worst = max(
            worst,
            fd_jacobian_check(lambda c: system.matrix @ c - system.rhs, system.matrix, c_old),
        )

        displacement = DisplacementProblem(mesh, ElasticityMap.from_catalog(mesh, catalog), props)
        phi = rng.uniform(0.0, 1.0, mesh.n_nodes)
        C = rng.uniform(0.0, 0.08, mesh.n_nodes)
        u = rng.uniform(-1.0, 1.0, 2 * mesh.n_nodes) * 1e-3 * size
        worst = max(
            worst,
            fd_jacobian_check(
                lambda v: displacement.internal_force(v, phi, C), displacement.stiffness(phi), u,
                perturbation=1e-3 * size,
            ),
        )

        phase = PhaseFieldProblem(mesh, props.fracture_toughness, size)
        history = rng.uniform(0.0, 10.0, mesh.geometry.wdet.shape)
        worst = max(
            worst,
            fd_jacobian_check(lambda p: phase.residual(p, history), phase.assemble(history).matrix, phi),
        )
    return _report("jacobian", worst, threshold, started)


def check_free_swelling(
    side: float = 1.0, c_uniform: float = FLAX_EPOXY_SATURATION, threshold: float = 1e-6
) -> OracleReport:
    """Free homogeneous square swells without stress; reports the worse of two relative errors."""
    started = time.perf_counter()
    catalog = matrix_only_catalog()
    mesh = build_rect_mesh(Domain2D(side, side), side / 4)
    props = build_property_fields(IndicatorField.zeros(mesh.n_nodes, side), mesh, catalog)
    problem = DisplacementProblem(mesh, ElasticityMap.from_catalog(mesh, catalog), props)

    origin = mesh.nearest_node(0.0, 0.0)
    corner = mesh.nearest_node(side, 0.0)
    constraints = Constraints.merge(
        (np.array([2 * origin, 2 * origin + 1]), 0.0),
        (np.array([2 * corner + 1]), 0.0),
    )
    C = np.full(mesh.n_nodes, c_uniform)
    phi = np.zeros(mesh.n_nodes)
    u = problem.solve(np.zeros(problem.n_dofs), phi, C, constraints)

    E = catalog.matrix.E11
    stress_error = float(np.max(np.abs(problem.undamaged_stress(u, C)))) / E
    right = mesh.node_set("right")
    elongation = float(np.mean(u[2 * right]))
    expected = free_swelling_elongation(catalog.matrix.alpha11, c_uniform, side)
    strain_error = abs(elongation - expected) / side
    return _report("free-swelling", max(stress_error, strain_error), threshold, started)


ORACLES: Dict[str, Callable[[], OracleReport]] = {
    "slab-diffusion": check_slab_diffusion,
    "screened-poisson": check_screened_poisson,
    "at2-homogeneous": check_at2_homogeneous,
    "jacobian": check_jacobians,
    "free-swelling": check_free_swelling,
}


def run_oracle(name: str) -> OracleReport:
    """
    Run one registered verification.

    Raises:
        KeyError: For an unknown oracle name.
    """
    try:
        check = ORACLES[name]
    except KeyError:
        raise KeyError(f"Unknown oracle '{name}' (available: {sorted(ORACLES)})") from None
    return check()
