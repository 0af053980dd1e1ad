"""
Result writers: legacy ASCII VTK snapshots, the CSV time series and the run summary.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Dict, Iterable, List

import numpy as np
import pandas as pd

from src.geometry.elements import VTK_CELL_TYPES
from src.geometry.mesh import Mesh
from src.solvers.staggered import TIMESERIES_COLUMNS, FieldState, RunSummary, StaggeredSimulation

logger = logging.getLogger(__name__)

VTK_HEADER = "# vtk DataFile Version 3.0"
_FLOAT_FMT = "%.17g"


@dataclass
class OutputBundle:
    """Files written for one run."""

    directory: Path
    snapshots: List[Path] = field(default_factory=list)
    timeseries: Path | None = None
    summary: Path | None = None
    config: Path | None = None


def _write_grid(fh: IO[str], mesh: Mesh, title: str, time: float | None) -> None:
    fh.write(f"{VTK_HEADER}\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
    if time is not None:
        fh.write(f"FIELD FieldData 1\nTIME 1 1 double\n{time:.17g}\n")
    fh.write(f"POINTS {mesh.n_nodes} double\n")
    np.savetxt(fh, np.column_stack([mesh.nodes, np.zeros(mesh.n_nodes)]), fmt=_FLOAT_FMT)
    nen = mesh.nen
    fh.write(f"CELLS {mesh.n_elements} {mesh.n_elements * (nen + 1)}\n")
    np.savetxt(fh, np.column_stack([np.full(mesh.n_elements, nen), mesh.elements]), fmt="%d")
    fh.write(f"CELL_TYPES {mesh.n_elements}\n")
    np.savetxt(fh, np.full(mesh.n_elements, VTK_CELL_TYPES[mesh.order]), fmt="%d")


def _scalars(fh: IO[str], name: str, values: np.ndarray, integer: bool = False) -> None:
    kind = "int" if integer else "double"
    fh.write(f"SCALARS {name} {kind} 1\nLOOKUP_TABLE default\n")
    np.savetxt(fh, np.asarray(values).reshape(-1, 1), fmt="%d" if integer else _FLOAT_FMT)


def _prepare(path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_vtk(
    state: FieldState,
    mesh: Mesh,
    path: str | Path,
    stress: np.ndarray | None = None,
    title: str = "hygrofrac snapshot",
) -> Path:
    """
    Write one snapshot as a legacy ASCII unstructured grid.

    Point data: ``displacement`` (z = 0), ``damage``, ``concentration``,
    ``indicator`` and, when ``stress`` ``(n, 3)`` is given, ``stress_xx``,
    ``stress_yy``, ``stress_xy``. Cell data: element-mean ``history`` and
    ``region``. The simulation time is stored in the ``TIME`` field.

    Raises:
        ValueError: When a field does not match the mesh.
        OSError: When the file cannot be written.
    """
    n = mesh.n_nodes
    for name, values, size in (
        ("displacement", state.u, 2 * n),
        ("damage", state.phi, n),
        ("concentration", state.C, n),
        ("indicator", state.indicator, n),
    ):
        if np.asarray(values).size != size:
            raise ValueError(f"Field '{name}' has {np.asarray(values).size} values, mesh needs {size}")

    path = _prepare(path)
    with path.open("w", encoding="ascii") as fh:
        _write_grid(fh, mesh, title, state.time)
        fh.write(f"POINT_DATA {n}\nVECTORS displacement double\n")
        np.savetxt(fh, np.column_stack([state.u.reshape(n, 2), np.zeros(n)]), fmt=_FLOAT_FMT)
        _scalars(fh, "damage", state.phi)
        _scalars(fh, "concentration", state.C)
        _scalars(fh, "indicator", state.indicator)
        if stress is not None:
            for i, name in enumerate(("stress_xx", "stress_yy", "stress_xy")):
                _scalars(fh, name, stress[:, i])
        fh.write(f"CELL_DATA {mesh.n_elements}\n")
        _scalars(fh, "history", np.asarray(state.history).mean(axis=1))
        _scalars(fh, "region", mesh.regions, integer=True)
    return path


def write_mesh_vtk(mesh: Mesh, path: str | Path) -> Path:
    """Mesh only, with region tags and fibre orientation as cell data."""
    path = _prepare(path)
    with path.open("w", encoding="ascii") as fh:
        _write_grid(fh, mesh, "hygrofrac mesh", None)
        fh.write(f"CELL_DATA {mesh.n_elements}\n")
        _scalars(fh, "region", mesh.regions, integer=True)
        _scalars(fh, "orientation", mesh.orientations)
    return path


def read_vtk_points(path: str | Path) -> np.ndarray:
    """Node table ``(n, 3)`` of a file written by :func:`write_vtk`."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    start = next(i for i, line in enumerate(lines) if line.startswith("POINTS"))
    n = int(lines[start].split()[1])
    return np.loadtxt(lines[start + 1 : start + 1 + n], ndmin=2)


def write_timeseries(records: Iterable[Dict[str, object]], path: str | Path) -> Path:
    """
    CSV of the per-step observables; an empty run gives the header only.

    Raises:
        ValueError: When rows are not strictly increasing in time.
    """
    frame = pd.DataFrame(list(records), columns=list(TIMESERIES_COLUMNS))
    times = frame["time_s"].to_numpy(dtype=float)
    if times.size > 1 and not np.all(np.diff(times) > 0):
        raise ValueError("Time series rows must be strictly increasing in time")
    path = _prepare(path)
    frame.to_csv(path, index=False, float_format="%.10g")
    return path


def read_timeseries(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path)


def format_summary(name: str, summary: RunSummary, final_time: float, status: str = "completed") -> str:
    lines = [
        f"scenario: {name}",
        f"status: {status}",
        f"final_time_s: {final_time:.6g}",
        f"accepted_steps: {summary.accepted_steps}",
        f"rejected_steps: {summary.rejected_steps}",
        f"peak_force_N: {summary.peak_force:.6g}",
        f"final_elongation_mm: {summary.final_elongation:.6g}",
        f"peak_damage: {summary.peak_damage:.6g}",
        f"final_center_concentration: {summary.final_center_concentration:.6g}",
        f"final_total_moisture: {summary.final_total_moisture:.6g}",
    ]
    for stage, uptake in summary.uptake_by_stage.items():
        lines.append(f"uptake[{stage}]: {uptake:.6g}")
    for theta, peak in sorted(summary.peak_damage_by_orientation.items()):
        lines.append(f"peak_damage[theta={theta:g}]: {peak:.6g}")
    lines.append(f"wall_time_s: {summary.wall_time:.3f}")
    return "\n".join(lines) + "\n"


def write_summary(text: str, path: str | Path) -> Path:
    path = _prepare(path)
    path.write_text(text, encoding="utf-8")
    return path


class SnapshotWriter:
    """Snapshot callback for :meth:`StaggeredSimulation.run` writing numbered VTK files."""

    def __init__(self, simulation: StaggeredSimulation, directory: str | Path, enabled: bool = True):
        self.simulation = simulation
        self.directory = Path(directory)
        self.enabled = enabled
        self.paths: List[Path] = []

    def __call__(self, state: FieldState) -> None:
        if not self.enabled:
            return
        stress = self.simulation.displacement.nodal_stress(state.u, state.phi, state.C)
        path = self.directory / f"snapshot_{len(self.paths):04d}.vtk"
        write_vtk(state, self.simulation.mesh, path, stress=stress, title=f"t={state.time:.6g} s")
        self.paths.append(path)
        logger.debug("Snapshot %s at t=%.6g s", path.name, state.time)
