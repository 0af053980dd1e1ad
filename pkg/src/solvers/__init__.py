"""Moisture, displacement and phase-field solvers and the staggered driver."""

from .diffusion import (
    ConcentrationField,
    DiffusionSolver,
    DirichletEntry,
    FluxEntry,
    MoistureBC,
    assemble_diffusion,
    step_diffusion,
    total_moisture,
)
from .fracture import (
    DisplacementProblem,
    ElasticityMap,
    MechanicalBC,
    MechanicalEntry,
    NewtonError,
    PhaseFieldProblem,
    assemble_displacement,
    assemble_phase_field,
    crack_density,
    reaction_force,
    solve_displacement,
)
from .staggered import (
    TIMESERIES_COLUMNS,
    FieldState,
    Observables,
    RunSummary,
    SimulationAborted,
    SimulationResult,
    SolverSettings,
    StaggeredSimulation,
    Stage,
    StageSchedule,
    StepRejected,
    run,
    staggered_step,
)

__all__ = [
    "TIMESERIES_COLUMNS",
    "ConcentrationField",
    "DiffusionSolver",
    "DirichletEntry",
    "DisplacementProblem",
    "ElasticityMap",
    "FieldState",
    "FluxEntry",
    "MechanicalBC",
    "MechanicalEntry",
    "MoistureBC",
    "NewtonError",
    "Observables",
    "PhaseFieldProblem",
    "RunSummary",
    "SimulationAborted",
    "SimulationResult",
    "SolverSettings",
    "StaggeredSimulation",
    "Stage",
    "StageSchedule",
    "StepRejected",
    "assemble_diffusion",
    "assemble_displacement",
    "assemble_phase_field",
    "crack_density",
    "reaction_force",
    "run",
    "solve_displacement",
    "staggered_step",
    "step_diffusion",
    "total_moisture",
]
