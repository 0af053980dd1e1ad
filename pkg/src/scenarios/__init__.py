"""Scenario configuration, built-in presets, result writers and the command line."""

from .cli import main, resolve_config, run_scenario
from .config import (
    ConfigError,
    ConfigIssue,
    ScenarioConfig,
    build_mesh,
    config_to_dict,
    dump_config,
    load_config,
    parse_config,
    save_config,
    validate_config,
    with_overrides,
)
from .outputs import (
    OutputBundle,
    SnapshotWriter,
    format_summary,
    read_timeseries,
    read_vtk_points,
    write_mesh_vtk,
    write_summary,
    write_timeseries,
    write_vtk,
)
from .presets import PRESETS, SECP_VARIANTS, UnknownPresetError, preset

__all__ = [
    "PRESETS",
    "SECP_VARIANTS",
    "ConfigError",
    "ConfigIssue",
    "OutputBundle",
    "ScenarioConfig",
    "SnapshotWriter",
    "UnknownPresetError",
    "build_mesh",
    "config_to_dict",
    "dump_config",
    "format_summary",
    "load_config",
    "main",
    "parse_config",
    "preset",
    "read_timeseries",
    "read_vtk_points",
    "resolve_config",
    "run_scenario",
    "save_config",
    "validate_config",
    "with_overrides",
    "write_mesh_vtk",
    "write_summary",
    "write_timeseries",
    "write_vtk",
]
