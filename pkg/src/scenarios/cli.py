"""
Command-line entry point.

Subcommands::

    run <preset|config.yaml>   run a scenario and write VTK, CSV and summary
    validate <preset|config>   check a configuration without solving
    oracle <name|all>          run a verification and print PASS/FAIL
    list-presets               print the built-in scenarios

Exit codes: 0 success, 1 failed oracle, 2 invalid configuration or unknown
preset, 3 simulation aborted.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Sequence

from src.geometry import MeshError
from src.geometry.mesh import dump_mesh_text
from src.materials import MaterialError
from src.oracles.reports import ORACLES, OracleReport, run_oracle
from src.solvers.staggered import SimulationAborted, SimulationResult, StaggeredSimulation

from .config import (
    ConfigError,
    ScenarioConfig,
    build_catalog,
    build_mesh,
    build_observables,
    build_schedule,
    build_settings,
    load_config,
    save_config,
    validate_config,
    with_overrides,
)
from .outputs import (
    OutputBundle,
    SnapshotWriter,
    format_summary,
    write_mesh_vtk,
    write_summary,
    write_timeseries,
)
from .presets import DEFAULT_MESH_SCALE, PRESETS, SECP_VARIANTS, UnknownPresetError, preset

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ORACLE_FAILED = 1
EXIT_CONFIG = 2
EXIT_ABORTED = 3

OUTPUT_ENV = "HYGROFRAC_OUTPUT_DIR"
DEFAULT_OUTPUT = "results"


def resolve_config(target: str, variant: str | None = None) -> ScenarioConfig:
    """
    Preset name or path to a YAML file.

    Raises:
        UnknownPresetError: When ``target`` is neither a preset nor an existing file.
        ConfigError: When the file does not validate.
    """
    if target in PRESETS:
        return preset(target, variant=variant)
    path = Path(target)
    if path.is_file():
        if variant is not None:
            logger.warning("--variant is ignored for configuration files")
        return load_config(path)
    raise UnknownPresetError(f"'{target}' is neither a preset ({sorted(PRESETS)}) nor a file")


def output_directory(cfg: ScenarioConfig, out: str | Path | None = None) -> Path:
    """``--out``, then ``output.directory``, then ``$HYGROFRAC_OUTPUT_DIR/<name>``."""
    if out is not None:
        return Path(out)
    if cfg.output.directory:
        return Path(cfg.output.directory)
    return Path(os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT)) / cfg.name


def run_scenario(cfg: ScenarioConfig, out_dir: str | Path | None = None) -> tuple[SimulationResult, OutputBundle]:
    """
    Build, solve and write one scenario.

    The configuration actually used is saved next to the results as
    ``config.yaml`` so the run can be repeated with ``run <dir>/config.yaml``.

    Raises:
        MeshError: When the geometry cannot be meshed.
        MaterialError: For invalid material overrides.
        SimulationAborted: When a step keeps failing after every halving.
    """
    directory = output_directory(cfg, out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    bundle = OutputBundle(directory=directory)
    bundle.config = save_config(cfg, directory / "config.yaml")

    mesh, _ = build_mesh(cfg)
    if cfg.output.mesh_dump:
        dump_mesh_text(mesh, directory / "mesh.txt")
        write_mesh_vtk(mesh, directory / "mesh.vtk")

    simulation = StaggeredSimulation(
        mesh,
        build_catalog(cfg),
        build_schedule(cfg),
        build_settings(cfg),
        build_observables(cfg),
    )
    writer = SnapshotWriter(simulation, directory, enabled=cfg.output.vtk)
    try:
        result = simulation.run(on_snapshot=writer)
    finally:
        bundle.snapshots = list(writer.paths)

    if cfg.output.csv:
        bundle.timeseries = write_timeseries(result.records, directory / "timeseries.csv")
    text = format_summary(cfg.name, result.summary, result.state.time)
    bundle.summary = write_summary(text, directory / "summary.txt")
    logger.info("Results for '%s' in %s (%d snapshots)", cfg.name, directory, len(bundle.snapshots))
    return result, bundle


def _scenario_from_args(args: argparse.Namespace) -> ScenarioConfig:
    cfg = resolve_config(args.target, args.variant)
    cfg = with_overrides(
        cfg,
        mesh_scale=args.mesh_scale,
        dt_scale=args.dt_scale,
        seed=args.seed,
        multi_pass=True if args.multi_pass else None,
        fibre_diffusivity=args.fibre_diffusivity,
    )
    issues = validate_config(cfg)
    if issues:
        raise ConfigError(issues, source=args.target)
    return cfg


def _print_issues(exc: ConfigError) -> None:
    print(f"Invalid configuration {exc.source}:", file=sys.stderr)
    for issue in exc.issues:
        print(f"  {issue}", file=sys.stderr)


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = _scenario_from_args(args)
        _, bundle = run_scenario(cfg, args.out)
    except ConfigError as exc:
        _print_issues(exc)
        return EXIT_CONFIG
    except (UnknownPresetError, MeshError, MaterialError) as exc:
        print(f"Error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationAborted as exc:
        print(f"Simulation aborted: {exc}", file=sys.stderr)
        for key, value in exc.diagnostics.items():
            print(f"  {key}: {value}", file=sys.stderr)
        return EXIT_ABORTED

    print(bundle.summary.read_text(encoding="utf-8"), end="")
    print(f"output: {bundle.directory}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        cfg = resolve_config(args.target, args.variant)
        issues = validate_config(cfg)
        if issues:
            raise ConfigError(issues, source=args.target)
    except ConfigError as exc:
        _print_issues(exc)
        return EXIT_CONFIG
    except UnknownPresetError as exc:
        print(f"Error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"OK {cfg.name}")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    names: Sequence[str] = sorted(ORACLES) if args.name == "all" else [args.name]
    reports: List[OracleReport] = []
    for name in names:
        report = run_oracle(name)
        print(report.line())
        reports.append(report)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_ORACLE_FAILED


def cmd_list_presets(args: argparse.Namespace) -> int:
    for name, factory in PRESETS.items():
        doc = (factory.__doc__ or "").strip().splitlines()
        summary = doc[0] if doc else ""
        print(f"{name:<16} mesh-scale {DEFAULT_MESH_SCALE[name]:g}  {summary}")
    print(f"secp_plate variants: {', '.join(SECP_VARIANTS)}")
    return EXIT_OK


def _verbosity_flags(parser: argparse.ArgumentParser, default: object) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("-q", "--quiet", action="store_true", default=default, help="only warnings and errors")
    group.add_argument("-v", "--verbose", action="store_true", default=default, help="debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hygrofrac",
        description="Moisture-driven fracture of fibre composites (diffusion + phase field).",
    )
    _verbosity_flags(parser, False)
    common = argparse.ArgumentParser(add_help=False)
    _verbosity_flags(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="run a preset or a YAML scenario")
    run.add_argument("target", help="preset name or path to a YAML scenario")
    run.add_argument("--variant", choices=SECP_VARIANTS, help="secp_plate environment variant")
    run.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or '{DEFAULT_OUTPUT}')")
    run.add_argument("--mesh-scale", type=float, help="element-size multiplier")
    run.add_argument("--dt-scale", type=float, help="time-step multiplier")
    run.add_argument("--seed", type=int, help="seed for random fibre placement")
    run.add_argument("--multi-pass", action="store_true", help="iterate the staggered sweep to convergence")
    run.add_argument("--fibre-diffusivity", type=float, help="fibre diffusivity override [mm^2/s]")
    run.set_defaults(handler=cmd_run)

    validate = sub.add_parser("validate", parents=[common], help="check a configuration without solving")
    validate.add_argument("target", help="preset name or path to a YAML scenario")
    validate.add_argument("--variant", choices=SECP_VARIANTS, help="secp_plate environment variant")
    validate.set_defaults(handler=cmd_validate)

    oracle = sub.add_parser("oracle", parents=[common], help="run a verification against a closed-form reference")
    oracle.add_argument("name", choices=sorted(ORACLES) + ["all"])
    oracle.set_defaults(handler=cmd_oracle)

    presets = sub.add_parser("list-presets", parents=[common], help="list the built-in scenarios")
    presets.set_defaults(handler=cmd_list_presets)
    return parser


def configure_logging(quiet: bool = False, verbose: bool = False) -> None:
    level = logging.WARNING if quiet else logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)-7s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.quiet, args.verbose)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
