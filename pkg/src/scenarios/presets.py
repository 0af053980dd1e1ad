"""
Built-in scenarios for flax/epoxy composites, from a single fibre up to a laminate.

Each preset is a complete :class:`ScenarioConfig`. ``DEFAULT_MESH_SCALE`` holds
the coarsening applied by default so every preset runs at desk scale; pass
``mesh_scale=1`` for the full-resolution mesh.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import Callable, Dict

from src.geometry import SERENDIPITY
from src.materials.catalog import FLAX_EPOXY_SATURATION
from src.solvers.diffusion import DirichletEntry
from src.solvers.fracture import MechanicalEntry

from .config import (
    CrackConfig,
    FibreConfig,
    GeometryConfig,
    NumericsConfig,
    ObservablesConfig,
    PhysicsConfig,
    ScenarioConfig,
    ScheduleConfig,
    StageConfig,
)

logger = logging.getLogger(__name__)

C_WET = FLAX_EPOXY_SATURATION

DEFAULT_MESH_SCALE: Dict[str, float] = {
    "single_fibre": 2.0,
    "multi_fibre_sa": 4.0,
    "multi_fibre_rd": 4.0,
    "secp_plate": 4.0,
    "ply": 4.0,
    "laminate": 4.0,
}

SECP_VARIANTS = ("no_moisture", "absorbed", "dried")
SECP_RAMP_RATE = 0.04  # mm/s at the top grip

# Top/bottom held vertically, right edge held horizontally; swelling alone loads the cell.
_CELL_GRIPS = (
    MechanicalEntry("top", "y"),
    MechanicalEntry("bottom", "y"),
    MechanicalEntry("right", "x"),
)
# Symmetry planes on the bottom and right edges.
_SYMMETRY = (
    MechanicalEntry("bottom", "y"),
    MechanicalEntry("right", "x"),
)


class UnknownPresetError(KeyError):
    """Raised for a preset name that is not registered."""


def _wet_dry(
    wet: float,
    dry: float,
    dt: float,
    sets: tuple[str, ...],
    mechanical: tuple[MechanicalEntry, ...],
    snapshot_every: int,
    dt_growth: float = 1.0,
    dt_max: float | None = None,
) -> ScheduleConfig:
    """Absorption at saturation on ``sets`` followed by drying to zero."""

    def stage(name: str, duration: float, value: float) -> StageConfig:
        return StageConfig(
            name=name,
            duration=duration,
            dt=dt,
            dt_growth=dt_growth,
            dt_max=dt_max,
            snapshot_every=snapshot_every,
            dirichlet=tuple(DirichletEntry(s, value) for s in sets),
            mechanical=mechanical,
        )

    return ScheduleConfig(stages=(stage("wet", wet, C_WET), stage("dry", dry, 0.0)))


def single_fibre() -> ScenarioConfig:
    """One centred fibre wetted from the left edge for 2,000 s, then dried for 5,000 s."""
    return ScenarioConfig(
        name="single_fibre",
        seed=1,
        geometry=GeometryConfig(
            width=0.02,
            height=0.02,
            h=0.0005,
            fibres=FibreConfig(kind="square_array", diameter=0.01, rows=1, cols=1),
        ),
        physics=PhysicsConfig(length_scale=0.001, indicator_length_scale=0.001),
        schedule=_wet_dry(2000.0, 5000.0, dt=20.0, sets=("left",), mechanical=_CELL_GRIPS, snapshot_every=25),
        numerics=NumericsConfig(mesh_scale=DEFAULT_MESH_SCALE["single_fibre"]),
        observables=ObservablesConfig(reaction_set="bottom", elongation_set="left"),
    )


def _multi_fibre(name: str, fibres: FibreConfig) -> ScenarioConfig:
    return ScenarioConfig(
        name=name,
        seed=1,
        geometry=GeometryConfig(width=0.1, height=0.1, h=0.00045, fibres=fibres),
        physics=PhysicsConfig(length_scale=0.0009, indicator_length_scale=0.0009),
        schedule=_wet_dry(30000.0, 60000.0, dt=300.0, sets=("left",), mechanical=_CELL_GRIPS, snapshot_every=25),
        numerics=NumericsConfig(mesh_scale=DEFAULT_MESH_SCALE[name]),
        observables=ObservablesConfig(reaction_set="bottom", elongation_set="left"),
    )


def multi_fibre_sa() -> ScenarioConfig:
    """36 fibres on a 6x6 square array in a 0.1 mm cell."""
    return _multi_fibre("multi_fibre_sa", FibreConfig(kind="square_array", diameter=0.01, rows=6, cols=6))


def multi_fibre_rd() -> ScenarioConfig:
    """The same 36 fibres dropped at random (seeded)."""
    return _multi_fibre(
        "multi_fibre_rd", FibreConfig(kind="random", diameter=0.01, count=36, min_gap=0.0005)
    )


def secp_plate(variant: str = "absorbed") -> ScenarioConfig:
    """
    Single-edge cracked plate pulled at the top after an environmental stage.

    Variants:
        ``no_moisture``: dry throughout, mechanical ramp only.
        ``absorbed``: initially dry, wetted on the left edge for 30,000 s.
        ``dried``: initially saturated (reference state), dried on the left edge
            for 60,000 s.
    """
    if variant not in SECP_VARIANTS:
        raise UnknownPresetError(f"Unknown secp_plate variant '{variant}' (available: {list(SECP_VARIANTS)})")

    clamped = (
        MechanicalEntry("bottom", "x"),
        MechanicalEntry("bottom", "y"),
        MechanicalEntry("top", "y"),
    )
    pulled = (
        MechanicalEntry("bottom", "x"),
        MechanicalEntry("bottom", "y"),
        MechanicalEntry("top", "y", rate=SECP_RAMP_RATE),
    )
    load = StageConfig(
        name="load",
        duration=1.0,
        dt=0.005,
        snapshot_every=40,
        freeze_moisture=True,
        mechanical=pulled,
    )

    initial, C0 = 0.0, 0.0
    if variant == "absorbed":
        environment = (
            StageConfig(
                name="absorb",
                duration=30000.0,
                dt=300.0,
                snapshot_every=50,
                dirichlet=(DirichletEntry("left", C_WET),),
                mechanical=clamped,
            ),
        )
    elif variant == "dried":
        initial, C0 = C_WET, C_WET
        environment = (
            StageConfig(
                name="dry",
                duration=60000.0,
                dt=600.0,
                snapshot_every=50,
                dirichlet=(DirichletEntry("left", 0.0),),
                mechanical=clamped,
            ),
        )
    else:
        environment = ()

    return ScenarioConfig(
        name=f"secp_plate_{variant}",
        seed=1,
        geometry=GeometryConfig(
            width=0.1,
            height=0.2,
            h=0.00045,
            fibres=FibreConfig(kind="random", diameter=0.01, count=72, min_gap=0.001),
            crack=CrackConfig(length=0.05, y=0.1),
        ),
        physics=PhysicsConfig(length_scale=0.0009, indicator_length_scale=0.0009, C0=C0),
        schedule=ScheduleConfig(initial_concentration=initial, stages=environment + (load,)),
        numerics=NumericsConfig(mesh_scale=DEFAULT_MESH_SCALE["secp_plate"]),
        observables=ObservablesConfig(reaction_set="top", elongation_set="top", elongation_component="y"),
    )


def ply() -> ScenarioConfig:
    """
    Ply section, 10 x 1.5 mm, with two straight fibre strips of 0.24 mm (V_f = 32 %).

    Symmetry on the bottom and right edges; moisture enters through the top
    and left edges.
    """
    d = 0.24
    pitch = 1.5 / 2
    bands = tuple((round(pitch * (k + 0.5) - d / 2, 6), round(pitch * (k + 0.5) + d / 2, 6)) for k in range(2))
    return ScenarioConfig(
        name="ply",
        seed=1,
        geometry=GeometryConfig(
            width=10.0,
            height=1.5,
            h=0.013,
            order=SERENDIPITY,
            fibres=FibreConfig(kind="strips", diameter=d, bands=bands, orientations=(0.0, 0.0)),
        ),
        physics=PhysicsConfig(length_scale=0.026, indicator_length_scale=0.026),
        schedule=_wet_dry(
            2.5e7,
            5.0e7,
            dt=1000.0,
            sets=("top", "left"),
            mechanical=_SYMMETRY,
            snapshot_every=20,
            dt_growth=1.15,
            dt_max=2.5e5,
        ),
        numerics=NumericsConfig(mesh_scale=DEFAULT_MESH_SCALE["ply"]),
        observables=ObservablesConfig(reaction_set="bottom", elongation_set="left"),
    )


def laminate() -> ScenarioConfig:
    """
    Quarter of a [0/90]2s laminate: four 0.75 mm plies above the mid-plane.

    Plies alternate 90/0/90/0 from the mid-plane outward; each holds one
    0.24 mm fibre strip.
    """
    d = 0.24
    t_ply = 0.75
    layup = (90.0, 0.0, 90.0, 0.0)
    bands = tuple(
        (round(t_ply * (k + 0.5) - d / 2, 6), round(t_ply * (k + 0.5) + d / 2, 6)) for k in range(len(layup))
    )
    return ScenarioConfig(
        name="laminate",
        seed=1,
        geometry=GeometryConfig(
            width=10.0,
            height=t_ply * len(layup),
            h=0.013,
            order=SERENDIPITY,
            fibres=FibreConfig(kind="strips", diameter=d, bands=bands, orientations=layup),
        ),
        physics=PhysicsConfig(length_scale=0.026, indicator_length_scale=0.026),
        schedule=_wet_dry(
            1.0e8,
            3.0e8,
            dt=1000.0,
            sets=("top", "left"),
            mechanical=_SYMMETRY,
            snapshot_every=40,
            dt_growth=1.2,
            dt_max=1.0e6,
        ),
        numerics=NumericsConfig(mesh_scale=DEFAULT_MESH_SCALE["laminate"]),
        observables=ObservablesConfig(reaction_set="bottom", elongation_set="left"),
    )


PRESETS: Dict[str, Callable[..., ScenarioConfig]] = {
    "single_fibre": single_fibre,
    "multi_fibre_sa": multi_fibre_sa,
    "multi_fibre_rd": multi_fibre_rd,
    "secp_plate": secp_plate,
    "ply": ply,
    "laminate": laminate,
}


def preset(name: str, variant: str | None = None, mesh_scale: float | None = None) -> ScenarioConfig:
    """
    Build a registered scenario.

    Args:
        name: Preset name (see ``PRESETS``).
        variant: Only for ``secp_plate``.
        mesh_scale: Element-size multiplier replacing the preset default.

    Raises:
        UnknownPresetError: For an unknown name or variant.
    """
    try:
        factory = PRESETS[name]
    except KeyError:
        raise UnknownPresetError(f"Unknown preset '{name}' (available: {sorted(PRESETS)})") from None
    if variant is not None and name != "secp_plate":
        raise UnknownPresetError(f"Preset '{name}' has no variants")
    config = factory(variant) if variant is not None else factory()
    if mesh_scale is not None:
        config = replace(config, numerics=replace(config.numerics, mesh_scale=float(mesh_scale)))
    logger.debug("Preset %s (mesh_scale=%g)", config.name, config.numerics.mesh_scale)
    return config
