"""
Staggered moisture / displacement / damage driver.

Each increment runs, in order: a diffusion step, the displacement solve with
the updated eigenstrain and current damage, the history update and the
phase-field solve. Failed increments are retried with a halved step; accepted
states are immutable.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List

import numpy as np

from src.geometry.mesh import Mesh
from src.interface.indicator import IndicatorField, build_property_fields, solve_indicator
from src.linalg import ConstraintError, SolverError, select_solver
from src.materials.catalog import MaterialCatalog
from src.materials.constitutive import DEFAULT_KAPPA, update_history

from .diffusion import ConcentrationField, DiffusionSolver, MoistureBC
from .fracture import (
    DisplacementProblem,
    ElasticityMap,
    MechanicalBC,
    NewtonError,
    PhaseFieldProblem,
)

logger = logging.getLogger(__name__)

TIMESERIES_COLUMNS = (
    "time_s",
    "reaction_force_N",
    "C_center",
    "total_moisture",
    "elongation_mm",
    "max_damage",
    "stage",
)
_TIME_TOL = 1e-9


class StepRejected(RuntimeError):
    """Raised when a sub-solver fails inside one staggered increment."""


class SimulationAborted(RuntimeError):
    """Raised when an increment keeps failing after the allowed number of halvings."""

    def __init__(self, message: str, diagnostics: Dict[str, object]):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class Stage:
    """
    One segment of the loading history.

    Boundary-condition times (Dirichlet windows, displacement rates) are
    measured from the start of the stage.
    """

    name: str
    duration: float
    dt: float
    moisture: MoistureBC = field(default_factory=MoistureBC)
    mechanical: MechanicalBC = field(default_factory=MechanicalBC)
    dt_growth: float = 1.0
    dt_max: float | None = None
    snapshot_every: int = 0
    freeze_moisture: bool = False

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"Stage '{self.name}': duration must be positive (got {self.duration})")
        if not self.dt > 0:
            raise ValueError(f"Stage '{self.name}': dt must be positive (got {self.dt})")
        if self.dt_growth < 1.0:
            raise ValueError(f"Stage '{self.name}': dt_growth must be >= 1 (got {self.dt_growth})")

    def nominal_step(self, k: int) -> float:
        dt = self.dt * self.dt_growth**k
        return min(dt, self.dt_max) if self.dt_max is not None else dt

    def step_sizes(self) -> Iterator[float]:
        """Nominal step sizes covering the stage, the last one clipped."""
        t, k = 0.0, 0
        while t < self.duration * (1 - _TIME_TOL):
            dt = min(self.nominal_step(k), self.duration - t)
            yield dt
            t += dt
            k += 1


@dataclass(frozen=True)
class StageSchedule:
    stages: tuple[Stage, ...] = ()
    initial_concentration: float = 0.0

    @property
    def total_duration(self) -> float:
        return float(sum(s.duration for s in self.stages))

    def reference_concentration(self) -> float:
        """Largest prescribed concentration, the saturation value for uptake ratios."""
        values = [e.value for s in self.stages for e in s.moisture.dirichlet]
        values.append(self.initial_concentration)
        return max(values)


@dataclass(frozen=True)
class SolverSettings:
    """Physics and numerics knobs of the coupled run."""

    length_scale: float
    indicator_length_scale: float | None = None
    kappa: float = DEFAULT_KAPPA
    C0: float = 0.0
    split_mode: str = "bulk"
    multi_pass: bool = False
    multi_pass_tol: float = 1e-4
    multi_pass_max: int = 25
    max_halvings: int = 6
    solver: str = "auto"
    lumped_capacity: bool = False


@dataclass(frozen=True)
class Observables:
    """Which node sets feed the time series; forces are scaled by the out-of-plane ``thickness`` (mm)."""

    reaction_set: str = "bottom"
    reaction_component: str = "y"
    elongation_set: str = "right"
    elongation_component: str = "x"
    thickness: float = 1.0


@dataclass(frozen=True, eq=False)
class FieldState:
    """Primary fields plus the quadrature-point history at one accepted time."""

    u: np.ndarray
    phi: np.ndarray
    C: np.ndarray
    history: np.ndarray
    indicator: np.ndarray
    time: float = 0.0
    stage_index: int = 0


@dataclass
class RunSummary:
    final_elongation: float = 0.0
    peak_force: float = 0.0
    peak_damage: float = 0.0
    wall_time: float = 0.0
    final_center_concentration: float = 0.0
    final_total_moisture: float = 0.0
    uptake_by_stage: Dict[str, float] = field(default_factory=dict)
    peak_damage_by_orientation: Dict[float, float] = field(default_factory=dict)
    accepted_steps: int = 0
    rejected_steps: int = 0


@dataclass
class SimulationResult:
    state: FieldState
    records: List[Dict[str, object]]
    summary: RunSummary


SnapshotCallback = Callable[[FieldState], None]


class StaggeredSimulation:
    """
    Coupled solver for one mesh, catalog and schedule.

    The indicator is solved once at construction (unless given) and the
    interpolated property fields stay frozen for the whole run.
    """

    def __init__(
        self,
        mesh: Mesh,
        catalog: MaterialCatalog,
        schedule: StageSchedule,
        settings: SolverSettings,
        observables: Observables | None = None,
        indicator: IndicatorField | None = None,
    ):
        self.mesh = mesh
        self.catalog = catalog
        self.schedule = schedule
        self.settings = settings
        self.observables = observables or Observables()

        ell_d = settings.indicator_length_scale or settings.length_scale
        self.indicator = indicator or solve_indicator(
            mesh,
            mesh.node_sets.get("interface", np.zeros(0, dtype=np.int64)),
            ell_d,
            solver=select_solver(mesh.n_nodes, settings.solver),
        )
        self.properties = build_property_fields(self.indicator, mesh, catalog)
        self.diffusion = DiffusionSolver(
            mesh,
            self.properties.diffusivity,
            lumped_capacity=settings.lumped_capacity,
            solver=select_solver(mesh.n_nodes, settings.solver),
        )
        self.displacement = DisplacementProblem(
            mesh,
            ElasticityMap.from_catalog(mesh, catalog),
            self.properties,
            C0=settings.C0,
            kappa=settings.kappa,
            solver=select_solver(2 * mesh.n_nodes, settings.solver),
        )
        self.phase_field = PhaseFieldProblem(
            mesh,
            self.properties.fracture_toughness,
            settings.length_scale,
            solver=select_solver(mesh.n_nodes, settings.solver),
        )
        self.center_node = int(mesh.node_set("center")[0])

    def initial_state(self) -> FieldState:
        n = self.mesh.n_nodes
        return FieldState(
            u=np.zeros(2 * n),
            phi=np.zeros(n),
            C=np.full(n, float(self.schedule.initial_concentration)),
            history=np.zeros(self.mesh.geometry.wdet.shape),
            indicator=self.indicator.values,
            time=0.0,
            stage_index=0,
        )

    def staggered_step(
        self, state: FieldState, stage: Stage, dt: float, stage_time: float, stage_index: int = 0
    ) -> FieldState:
        """
        One increment of size ``dt`` starting at stage-local time ``stage_time``.

        Raises:
            StepRejected: When any sub-solve fails; ``state`` is left untouched.
        """
        t_new = stage_time + dt
        try:
            if stage.freeze_moisture:
                C = state.C
            else:
                C = self.diffusion.step(
                    ConcentrationField(values=state.C, time=stage_time), stage.moisture, dt
                ).values
            constraints = stage.mechanical.constraints(self.mesh, t_new)

            phi = state.phi
            u = state.u
            passes = self.settings.multi_pass_max if self.settings.multi_pass else 1
            for p in range(passes):
                u = self.displacement.solve(u, phi, C, constraints)
                psi_plus, _ = self.displacement.energy_split(u, C, self.settings.split_mode)
                history = update_history(state.history, psi_plus)
                phi_new = self.phase_field.solve(history, phi_old=state.phi)
                change = float(np.max(np.abs(phi_new - phi), initial=0.0))
                phi = phi_new
                if self.settings.multi_pass and change < self.settings.multi_pass_tol:
                    logger.debug("Staggered passes converged after %d passes", p + 1)
                    break
            else:
                if self.settings.multi_pass:
                    logger.warning(
                        "Staggered passes stopped at %d with |dphi|=%.3e", passes, change
                    )
        except (SolverError, NewtonError, ConstraintError) as exc:
            raise StepRejected(f"{stage.name} at t={state.time + dt:.6g} s: {exc}") from exc

        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(phi)) and np.all(np.isfinite(C))):
            raise StepRejected(f"{stage.name} at t={state.time + dt:.6g} s: non-finite fields")
        return FieldState(
            u=u,
            phi=phi,
            C=C,
            history=history,
            indicator=state.indicator,
            time=state.time + dt,
            stage_index=stage_index,
        )

    def record(self, state: FieldState, stage_name: str) -> Dict[str, object]:
        obs = self.observables
        reaction = self.displacement.reaction_force(
            state.u, state.phi, state.C, obs.reaction_set, obs.reaction_component
        )
        return {
            "time_s": state.time,
            "reaction_force_N": reaction * obs.thickness,
            "C_center": float(state.C[self.center_node]),
            "total_moisture": self.diffusion.total_moisture(state.C),
            "elongation_mm": self.elongation(state),
            "max_damage": float(state.phi.max(initial=0.0)),
            "stage": stage_name,
        }

    def elongation(self, state: FieldState) -> float:
        obs = self.observables
        nodes = self.mesh.node_set(obs.elongation_set)
        comp = 0 if obs.elongation_component == "x" else 1
        if nodes.size == 0:
            return 0.0
        return float(np.max(np.abs(state.u[2 * nodes + comp])))

    def peak_damage_by_orientation(self, phi: np.ndarray) -> Dict[float, float]:
        fibre = self.mesh.regions >= 0
        if not np.any(fibre):
            return {}
        element_peak = phi[self.mesh.elements].max(axis=1)
        out = {}
        for theta in np.unique(self.mesh.orientations[fibre]):
            mask = fibre & (self.mesh.orientations == theta)
            out[float(theta)] = float(element_peak[mask].max())
        return out

    def advance_stage(
        self,
        state: FieldState,
        stage: Stage,
        stage_index: int,
        records: List[Dict[str, object]],
        summary: RunSummary,
        on_snapshot: SnapshotCallback | None = None,
    ) -> FieldState:
        logger.info(
            "Stage %d '%s': %.6g s, dt=%.4g s%s",
            stage_index,
            stage.name,
            stage.duration,
            stage.dt,
            " (moisture frozen)" if stage.freeze_moisture else "",
        )
        t_local = 0.0
        snapped = False
        for step, dt in enumerate(stage.step_sizes(), start=1):
            state = self._accept_with_halving(state, stage, stage_index, dt, t_local, summary)
            t_local += dt
            records.append(self.record(state, stage.name))
            snapped = bool(stage.snapshot_every) and step % stage.snapshot_every == 0
            if snapped and on_snapshot is not None:
                on_snapshot(state)
        if not snapped and on_snapshot is not None:
            on_snapshot(state)
        return state

    def _accept_with_halving(
        self,
        state: FieldState,
        stage: Stage,
        stage_index: int,
        dt: float,
        t_local: float,
        summary: RunSummary,
    ) -> FieldState:
        """Cover ``dt`` with sub-steps, halving after each rejection."""
        target = t_local + dt
        sub_dt = dt
        halvings = 0
        last_error: StepRejected | None = None
        while t_local < target - _TIME_TOL * max(dt, 1.0):
            sub_dt = min(sub_dt, target - t_local)
            try:
                state = self.staggered_step(state, stage, sub_dt, t_local, stage_index)
            except StepRejected as exc:
                summary.rejected_steps += 1
                halvings += 1
                last_error = exc
                if halvings > self.settings.max_halvings:
                    raise SimulationAborted(
                        f"Step failed after {self.settings.max_halvings} halvings: {exc}",
                        diagnostics={
                            "stage": stage.name,
                            "time_s": state.time,
                            "dt": sub_dt,
                            "error": str(last_error),
                        },
                    ) from exc
                sub_dt *= 0.5
                logger.warning("Step rejected (%s); retrying with dt=%.4g s", exc, sub_dt)
                continue
            t_local += sub_dt
            summary.accepted_steps += 1
        return state

    def run(self, on_snapshot: SnapshotCallback | None = None) -> SimulationResult:
        """Run every stage from the initial state."""
        started = time.perf_counter()
        state = self.initial_state()
        first = self.schedule.stages[0].name if self.schedule.stages else "initial"
        records = [self.record(state, first)]
        summary = RunSummary()
        if on_snapshot is not None:
            on_snapshot(state)

        c_ref = self.schedule.reference_concentration()
        area = self.mesh.domain.area
        for index, stage in enumerate(self.schedule.stages):
            state = self.advance_stage(state, stage, index, records, summary, on_snapshot)
            if c_ref > 0:
                summary.uptake_by_stage[stage.name] = self.diffusion.total_moisture(state.C) / (c_ref * area)

        forces = [abs(float(r["reaction_force_N"])) for r in records]
        summary.final_elongation = self.elongation(state)
        summary.peak_force = max(forces) if forces else 0.0
        summary.peak_damage = float(max(r["max_damage"] for r in records))
        summary.final_center_concentration = float(state.C[self.center_node])
        summary.final_total_moisture = self.diffusion.total_moisture(state.C)
        summary.peak_damage_by_orientation = self.peak_damage_by_orientation(state.phi)
        summary.wall_time = time.perf_counter() - started
        logger.info(
            "Run finished: %d steps (%d rejected), peak force %.4g N, peak damage %.4f, %.1f s",
            summary.accepted_steps,
            summary.rejected_steps,
            summary.peak_force,
            summary.peak_damage,
            summary.wall_time,
        )
        return SimulationResult(state=state, records=records, summary=summary)


def staggered_step(
    simulation: StaggeredSimulation, state: FieldState, stage: Stage, dt: float, stage_time: float = 0.0
) -> FieldState:
    return simulation.staggered_step(state, stage, dt, stage_time, state.stage_index)


def run(
    schedule: StageSchedule,
    mesh: Mesh,
    catalog: MaterialCatalog,
    settings: SolverSettings,
    observables: Observables | None = None,
    on_snapshot: SnapshotCallback | None = None,
) -> SimulationResult:
    """Indicator pre-solve followed by every stage of ``schedule``."""
    return StaggeredSimulation(mesh, catalog, schedule, settings, observables).run(on_snapshot)
