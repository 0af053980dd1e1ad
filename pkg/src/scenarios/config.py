"""
Scenario configuration.

A scenario is one YAML document with the sections ``geometry``, ``materials``,
``physics``, ``schedule``, ``numerics``, ``output`` and ``observables`` plus the
top-level ``name`` and ``seed``. It is parsed into frozen dataclasses; unknown
keys, wrong types and out-of-range values are all collected and reported
together, each anchored to its YAML line, before anything is solved.

Lengths are in mm, times in s, stresses in MPa, concentrations as mass
fractions.
"""

from __future__ import annotations

import logging
import math
import types
import typing
from dataclasses import MISSING, dataclass, field, fields, is_dataclass, replace
from pathlib import Path
from typing import Any, Dict, List

import yaml

from src.geometry import (
    BILINEAR,
    SERENDIPITY,
    CrackSeam,
    Domain2D,
    FibreLayout,
    Mesh,
    build_rect_mesh,
    classify_regions,
    insert_edge_crack,
    place_fibre_strips,
    place_fibres_random,
    place_fibres_square_array,
)
from src.geometry.mesh import SIDES
from src.linalg.solvers import SOLVER_CHOICES
from src.materials.catalog import (
    BUILTIN_CATALOGS,
    InterfaceMaterial,
    MaterialCatalog,
    MaterialError,
    PhaseMaterial,
    get_catalog,
)
from src.materials.constitutive import DEFAULT_KAPPA, SPLIT_MODES
from src.solvers.diffusion import DirichletEntry, FluxEntry, MoistureBC
from src.solvers.fracture import COMPONENTS, MechanicalBC, MechanicalEntry
from src.solvers.staggered import Observables, SolverSettings, Stage, StageSchedule

logger = logging.getLogger(__name__)

FIBRE_KINDS = ("none", "square_array", "random", "strips")
ELEMENT_ORDERS = (BILINEAR, SERENDIPITY)
BASE_NODE_SETS = ("left", "right", "bottom", "top", "center", "interface")
CRACK_NODE_SETS = ("crack_lower", "crack_upper")

_PHASE_KEYS = tuple(f.name for f in fields(PhaseMaterial) if f.name != "name")
_INTERFACE_KEYS = tuple(f.name for f in fields(InterfaceMaterial))
_POSITIVE_MATERIAL_KEYS = ("E11", "E22", "G12", "fracture_toughness", "diffusivity")


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConfigIssue:
    """One validation problem at a dotted key path."""

    path: str
    message: str
    line: int | None = None

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{where}{self.path or '<root>'}: {self.message}"


class ConfigError(ValueError):
    """Raised when a scenario configuration does not validate."""

    def __init__(self, issues: List[ConfigIssue], source: str = "<config>"):
        self.issues = list(issues)
        self.source = source
        detail = "\n".join(f"  {issue}" for issue in self.issues)
        super().__init__(f"Invalid configuration {source} ({len(self.issues)} issue(s)):\n{detail}")


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FibreConfig:
    """
    Fibre layout.

    ``square_array`` uses ``rows``/``cols``, ``random`` uses ``count`` and
    ``min_gap`` (seeded by the scenario seed), ``strips`` uses ``bands`` of
    ``[y_min, y_max]`` with one fibre-axis angle per band in ``orientations``.
    """

    kind: str = "none"
    diameter: float = 0.0
    rows: int = 0
    cols: int = 0
    count: int = 0
    min_gap: float = 0.0
    bands: tuple[tuple[float, float], ...] = ()
    orientations: tuple[float, ...] = ()


@dataclass(frozen=True)
class CrackConfig:
    """Straight edge crack of ``length`` along ``y``, starting at ``x0`` (left edge by default)."""

    length: float = 0.0
    y: float = 0.0
    x0: float | None = None


@dataclass(frozen=True)
class GeometryConfig:
    width: float = 1.0
    height: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)
    h: float = 0.1
    order: str = BILINEAR
    fibres: FibreConfig = field(default_factory=FibreConfig)
    crack: CrackConfig = field(default_factory=CrackConfig)


@dataclass(frozen=True)
class MaterialsConfig:
    """Built-in catalog plus per-phase field overrides."""

    catalog: str = "flax-epoxy"
    matrix: Dict[str, float] = field(default_factory=dict)
    fibre: Dict[str, float] = field(default_factory=dict)
    interface: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class PhysicsConfig:
    length_scale: float = 0.001
    indicator_length_scale: float | None = None
    exponent: float = 2.0
    kappa: float = DEFAULT_KAPPA
    C0: float = 0.0
    thickness: float = 1.0
    split_modulus: str = "bulk"


@dataclass(frozen=True)
class StageConfig:
    name: str = "stage"
    duration: float = 1.0
    dt: float = 1.0
    dt_growth: float = 1.0
    dt_max: float | None = None
    snapshot_every: int = 0
    freeze_moisture: bool = False
    dirichlet: tuple[DirichletEntry, ...] = ()
    flux: tuple[FluxEntry, ...] = ()
    mechanical: tuple[MechanicalEntry, ...] = ()


@dataclass(frozen=True)
class ScheduleConfig:
    initial_concentration: float = 0.0
    stages: tuple[StageConfig, ...] = ()


@dataclass(frozen=True)
class NumericsConfig:
    solver: str = "auto"
    multi_pass: bool = False
    multi_pass_tol: float = 1e-4
    multi_pass_max: int = 25
    max_halvings: int = 6
    lumped_capacity: bool = False
    points_per_axis: int = 2
    mesh_scale: float = 1.0
    dt_scale: float = 1.0


@dataclass(frozen=True)
class OutputConfig:
    directory: str | None = None
    vtk: bool = True
    csv: bool = True
    mesh_dump: bool = False


@dataclass(frozen=True)
class ObservablesConfig:
    reaction_set: str = "bottom"
    reaction_component: str = "y"
    elongation_set: str = "right"
    elongation_component: str = "x"


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario"
    seed: int = 0
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    materials: MaterialsConfig = field(default_factory=MaterialsConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    observables: ObservablesConfig = field(default_factory=ObservablesConfig)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_INVALID = object()


def _join(path: str, key: object) -> str:
    return f"{path}.{key}" if path else str(key)


def _coerce(value: Any, hint: Any, path: str, issues: List[ConfigIssue]) -> Any:
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)

    if origin in (typing.Union, types.UnionType):
        if value is None and type(None) in args:
            return None
        inner = next(a for a in args if a is not type(None))
        return _coerce(value, inner, path, issues)

    if is_dataclass(hint):
        return _parse_section(hint, value, path, issues)

    if origin is tuple:
        if not isinstance(value, (list, tuple)):
            issues.append(ConfigIssue(path, f"expected a list (got {type(value).__name__})"))
            return _INVALID
        if len(args) == 2 and args[1] is Ellipsis:
            item_hints = [args[0]] * len(value)
        else:
            if len(value) != len(args):
                issues.append(ConfigIssue(path, f"expected {len(args)} items (got {len(value)})"))
                return _INVALID
            item_hints = list(args)
        items = [_coerce(v, h, f"{path}[{i}]", issues) for i, (v, h) in enumerate(zip(value, item_hints))]
        return _INVALID if any(item is _INVALID for item in items) else tuple(items)

    if origin is dict:
        if not isinstance(value, dict):
            issues.append(ConfigIssue(path, f"expected a mapping (got {type(value).__name__})"))
            return _INVALID
        out = {str(k): _coerce(v, args[1], _join(path, k), issues) for k, v in value.items()}
        return _INVALID if any(v is _INVALID for v in out.values()) else out

    if hint is bool:
        if isinstance(value, bool):
            return value
    elif hint is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif hint is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        if isinstance(value, str):
            # YAML 1.1 reads exponents without a dot (1e-7) as strings
            try:
                return float(value)
            except ValueError:
                pass
    elif hint is str:
        if isinstance(value, str):
            return value
    else:
        raise TypeError(f"Unsupported config field type {hint!r} at {path}")

    issues.append(ConfigIssue(path, f"expected {hint.__name__} (got {value!r})"))
    return _INVALID


def _parse_section(cls: type, raw: Any, path: str, issues: List[ConfigIssue]) -> Any:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        issues.append(ConfigIssue(path, f"expected a mapping (got {type(raw).__name__})"))
        return _INVALID

    hints = typing.get_type_hints(cls)
    known = {f.name: f for f in fields(cls)}
    for key in raw:
        if key not in known:
            issues.append(ConfigIssue(_join(path, key), f"unknown key (allowed: {', '.join(known)})"))

    kwargs = {}
    failed = False
    for name, f in known.items():
        if name not in raw:
            if f.default is MISSING and f.default_factory is MISSING:
                issues.append(ConfigIssue(_join(path, name), "missing required key"))
                failed = True
            continue
        value = _coerce(raw[name], hints[name], _join(path, name), issues)
        if value is _INVALID:
            failed = True
        else:
            kwargs[name] = value
    if failed:
        return _INVALID
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        issues.append(ConfigIssue(path, str(exc)))
        return _INVALID


def _line_index(node: yaml.Node | None, path: str = "", index: Dict[str, int] | None = None) -> Dict[str, int]:
    """Map dotted key paths to 1-based YAML line numbers."""
    index = {} if index is None else index
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            key_path = _join(path, key_node.value)
            index[key_path] = key_node.start_mark.line + 1
            _line_index(value_node, key_path, index)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            item_path = f"{path}[{i}]"
            index[item_path] = item.start_mark.line + 1
            _line_index(item, item_path, index)
    return index


def _locate(path: str, index: Dict[str, int]) -> int | None:
    while path:
        if path in index:
            return index[path]
        cut = max(path.rfind("."), path.rfind("["))
        path = path[:cut] if cut > 0 else ""
    return None


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    """
    Parse and validate a scenario document.

    Raises:
        ConfigError: With every issue found, each carrying its YAML line.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError([ConfigIssue("", f"YAML syntax error: {exc}", line)], source) from exc

    issues: List[ConfigIssue] = []
    config = _parse_section(ScenarioConfig, raw, "", issues)
    if not issues and config is not _INVALID:
        issues.extend(validate_config(config))
    if issues:
        index = _line_index(node)
        raise ConfigError([replace(i, line=_locate(i.path, index)) for i in issues], source)
    return config


def load_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a YAML scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([ConfigIssue("", f"cannot read file: {exc}")], str(path)) from exc
    return parse_config(text, source=str(path))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _check(issues: List[ConfigIssue], ok: bool, path: str, message: str) -> None:
    if not ok:
        issues.append(ConfigIssue(path, message))


def _check_positive(issues: List[ConfigIssue], value: float | None, path: str) -> None:
    _check(issues, value is not None and value > 0, path, f"must be positive (got {value})")


def _check_choice(issues: List[ConfigIssue], value: str, choices: tuple, path: str) -> None:
    _check(issues, value in choices, path, f"must be one of {list(choices)} (got '{value}')")


def _validate_geometry(g: GeometryConfig, issues: List[ConfigIssue]) -> None:
    _check_positive(issues, g.width, "geometry.width")
    _check_positive(issues, g.height, "geometry.height")
    _check_positive(issues, g.h, "geometry.h")
    _check_choice(issues, g.order, ELEMENT_ORDERS, "geometry.order")

    f = g.fibres
    _check_choice(issues, f.kind, FIBRE_KINDS, "geometry.fibres.kind")
    if f.kind in ("square_array", "random"):
        _check_positive(issues, f.diameter, "geometry.fibres.diameter")
        _check(issues, f.min_gap >= 0, "geometry.fibres.min_gap", f"must be non-negative (got {f.min_gap})")
    if f.kind == "square_array":
        _check_positive(issues, f.rows, "geometry.fibres.rows")
        _check_positive(issues, f.cols, "geometry.fibres.cols")
    if f.kind == "random":
        _check(issues, f.count >= 0, "geometry.fibres.count", f"must be non-negative (got {f.count})")
    if f.kind == "strips":
        for i, (y0, y1) in enumerate(f.bands):
            _check(issues, y1 > y0, f"geometry.fibres.bands[{i}]", f"needs y_max > y_min (got [{y0}, {y1}])")
        _check(
            issues,
            not f.orientations or len(f.orientations) == len(f.bands),
            "geometry.fibres.orientations",
            f"needs one angle per band ({len(f.bands)})",
        )

    c = g.crack
    _check(
        issues,
        0 <= c.length < g.width,
        "geometry.crack.length",
        f"must satisfy 0 <= length < width (got {c.length})",
    )
    if c.length > 0:
        y_min = g.origin[1]
        _check(
            issues,
            y_min < c.y < y_min + g.height,
            "geometry.crack.y",
            f"must lie strictly inside the domain (got {c.y})",
        )


def _validate_materials(cfg: ScenarioConfig, issues: List[ConfigIssue]) -> None:
    m = cfg.materials
    before = len(issues)
    if m.catalog not in BUILTIN_CATALOGS:
        issues.append(
            ConfigIssue("materials.catalog", f"unknown catalog '{m.catalog}' (available: {sorted(BUILTIN_CATALOGS)})")
        )
        return
    for section, allowed in (("matrix", _PHASE_KEYS), ("fibre", _PHASE_KEYS), ("interface", _INTERFACE_KEYS)):
        for key, value in getattr(m, section).items():
            path = f"materials.{section}.{key}"
            if key not in allowed:
                issues.append(ConfigIssue(path, f"unknown material property (allowed: {', '.join(allowed)})"))
            elif key in _POSITIVE_MATERIAL_KEYS:
                _check_positive(issues, value, path)
    if len(issues) > before:
        return
    try:
        build_catalog(cfg)
    except MaterialError as exc:
        issues.append(ConfigIssue("materials", str(exc)))


def _validate_physics(p: PhysicsConfig, issues: List[ConfigIssue]) -> None:
    _check_positive(issues, p.length_scale, "physics.length_scale")
    if p.indicator_length_scale is not None:
        _check_positive(issues, p.indicator_length_scale, "physics.indicator_length_scale")
    _check(issues, p.exponent >= 1, "physics.exponent", f"must be >= 1 (got {p.exponent})")
    _check(issues, p.kappa >= 0, "physics.kappa", f"must be non-negative (got {p.kappa})")
    _check(issues, p.C0 >= 0, "physics.C0", f"must be non-negative (got {p.C0})")
    _check_positive(issues, p.thickness, "physics.thickness")
    _check_choice(issues, p.split_modulus, SPLIT_MODES, "physics.split_modulus")


def _validate_schedule(cfg: ScenarioConfig, node_sets: tuple, issues: List[ConfigIssue]) -> None:
    s = cfg.schedule
    _check(
        issues,
        s.initial_concentration >= 0,
        "schedule.initial_concentration",
        f"must be non-negative (got {s.initial_concentration})",
    )
    names = [st.name for st in s.stages]
    _check(issues, len(set(names)) == len(names), "schedule.stages", f"stage names must be unique (got {names})")
    for i, st in enumerate(s.stages):
        base = f"schedule.stages[{i}]"
        _check_positive(issues, st.duration, f"{base}.duration")
        _check_positive(issues, st.dt, f"{base}.dt")
        _check(issues, st.dt_growth >= 1, f"{base}.dt_growth", f"must be >= 1 (got {st.dt_growth})")
        if st.dt_max is not None:
            _check_positive(issues, st.dt_max, f"{base}.dt_max")
        _check(issues, st.snapshot_every >= 0, f"{base}.snapshot_every", "must be non-negative")
        for j, entry in enumerate(st.dirichlet):
            _check_choice(issues, entry.node_set, node_sets, f"{base}.dirichlet[{j}].node_set")
            _check(issues, entry.value >= 0, f"{base}.dirichlet[{j}].value", f"must be non-negative (got {entry.value})")
        for j, entry in enumerate(st.flux):
            _check_choice(issues, entry.side, SIDES, f"{base}.flux[{j}].side")
        for j, entry in enumerate(st.mechanical):
            _check_choice(issues, entry.node_set, node_sets, f"{base}.mechanical[{j}].node_set")


def _validate_numerics(n: NumericsConfig, issues: List[ConfigIssue]) -> None:
    _check_choice(issues, n.solver, SOLVER_CHOICES, "numerics.solver")
    _check_positive(issues, n.multi_pass_tol, "numerics.multi_pass_tol")
    _check_positive(issues, n.multi_pass_max, "numerics.multi_pass_max")
    _check(issues, n.max_halvings >= 0, "numerics.max_halvings", f"must be non-negative (got {n.max_halvings})")
    _check(issues, 1 <= n.points_per_axis <= 4, "numerics.points_per_axis", f"must be 1..4 (got {n.points_per_axis})")
    _check_positive(issues, n.mesh_scale, "numerics.mesh_scale")
    _check_positive(issues, n.dt_scale, "numerics.dt_scale")


def validate_config(cfg: ScenarioConfig) -> List[ConfigIssue]:
    """Semantic checks on an already well-typed configuration."""
    issues: List[ConfigIssue] = []
    _check(issues, bool(cfg.name.strip()), "name", "must not be empty")
    _validate_geometry(cfg.geometry, issues)
    _validate_materials(cfg, issues)
    _validate_physics(cfg.physics, issues)
    node_sets = BASE_NODE_SETS + (CRACK_NODE_SETS if cfg.geometry.crack.length > 0 else ())
    _validate_schedule(cfg, node_sets, issues)
    _validate_numerics(cfg.numerics, issues)
    obs = cfg.observables
    _check_choice(issues, obs.reaction_set, node_sets, "observables.reaction_set")
    _check_choice(issues, obs.elongation_set, node_sets, "observables.elongation_set")
    _check_choice(issues, obs.reaction_component, tuple(COMPONENTS), "observables.reaction_component")
    _check_choice(issues, obs.elongation_component, tuple(COMPONENTS), "observables.elongation_component")
    return issues


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _plain(value: Any) -> Any:
    if is_dataclass(value):
        return {f.name: _plain(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def config_to_dict(cfg: ScenarioConfig) -> Dict[str, Any]:
    """Nested plain-Python form that ``parse_config`` accepts back."""
    return _plain(cfg)


def dump_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False, default_flow_style=None)


def save_config(cfg: ScenarioConfig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_config(cfg), encoding="utf-8")
    return path


def with_overrides(
    cfg: ScenarioConfig,
    mesh_scale: float | None = None,
    dt_scale: float | None = None,
    seed: int | None = None,
    multi_pass: bool | None = None,
    fibre_diffusivity: float | None = None,
    output_dir: str | None = None,
) -> ScenarioConfig:
    """Apply command-line overrides; ``None`` leaves a value untouched."""
    numerics = cfg.numerics
    if mesh_scale is not None:
        numerics = replace(numerics, mesh_scale=float(mesh_scale))
    if dt_scale is not None:
        numerics = replace(numerics, dt_scale=float(dt_scale))
    if multi_pass is not None:
        numerics = replace(numerics, multi_pass=bool(multi_pass))
    materials = cfg.materials
    if fibre_diffusivity is not None:
        materials = replace(materials, fibre={**materials.fibre, "diffusivity": float(fibre_diffusivity)})
    output = cfg.output if output_dir is None else replace(cfg.output, directory=str(output_dir))
    return replace(
        cfg,
        seed=cfg.seed if seed is None else int(seed),
        numerics=numerics,
        materials=materials,
        output=output,
    )


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def _on_grid(coord: float, origin: float, length: float, n: int) -> bool:
    k = (coord - origin) / length * n
    return abs(k - round(k)) < 1e-6


def mesh_size(cfg: ScenarioConfig) -> float:
    """
    Target element size after ``mesh_scale``.

    With an edge crack the size is reduced until the crack line, its mouth and
    its tip all fall on element boundaries.
    """
    g = cfg.geometry
    h = g.h * cfg.numerics.mesh_scale
    if g.crack.length <= 0:
        return h
    x0 = g.origin[0] if g.crack.x0 is None else g.crack.x0
    ny0 = math.ceil(g.height / h - 1e-9)
    for ny in range(ny0, 4 * ny0 + 4):
        candidate = g.height / ny
        nx = math.ceil(g.width / candidate - 1e-9)
        if (
            _on_grid(g.crack.y, g.origin[1], g.height, ny)
            and _on_grid(x0, g.origin[0], g.width, nx)
            and _on_grid(x0 + g.crack.length, g.origin[0], g.width, nx)
        ):
            if ny != ny0:
                logger.info("Element size %.4g -> %.4g mm to align the crack seam", h, candidate)
            return candidate
    return h


def build_domain(cfg: ScenarioConfig) -> Domain2D:
    g = cfg.geometry
    return Domain2D(g.width, g.height, (float(g.origin[0]), float(g.origin[1])))


def build_layout(cfg: ScenarioConfig, domain: Domain2D) -> FibreLayout | None:
    f = cfg.geometry.fibres
    if f.kind == "square_array":
        return place_fibres_square_array(f.rows, f.cols, f.diameter, domain)
    if f.kind == "random":
        return place_fibres_random(f.count, f.diameter, domain, seed=cfg.seed, min_gap=f.min_gap)
    if f.kind == "strips":
        return place_fibre_strips(f.bands, f.orientations or None)
    return None


def build_mesh(cfg: ScenarioConfig) -> tuple[Mesh, CrackSeam | None]:
    """Mesh, fibre regions and the optional crack seam of a scenario."""
    g = cfg.geometry
    domain = build_domain(cfg)
    mesh = build_rect_mesh(
        domain,
        mesh_size(cfg),
        order=g.order,
        length_scale=cfg.physics.length_scale,
        points_per_axis=cfg.numerics.points_per_axis,
    )
    layout = build_layout(cfg, domain)
    if layout is not None:
        mesh = classify_regions(mesh, layout)
    seam = None
    if g.crack.length > 0:
        mesh, seam = insert_edge_crack(mesh, g.crack.length, g.crack.y, g.crack.x0)
    logger.info(
        "Mesh for '%s': %d elements, %d nodes, h=%.4g mm, %s",
        cfg.name,
        mesh.n_elements,
        mesh.n_nodes,
        mesh.h,
        g.order,
    )
    return mesh, seam


def build_catalog(cfg: ScenarioConfig) -> MaterialCatalog:
    """
    Built-in catalog with the configured overrides and exponent.

    Raises:
        MaterialError: For an unknown catalog or invalid overridden values.
    """
    m = cfg.materials
    base = get_catalog(m.catalog)
    matrix = replace(base.matrix, **m.matrix) if m.matrix else base.matrix
    fibre = base.fibre
    if m.fibre:
        if fibre is None:
            raise MaterialError(f"Catalog '{base.name}' has no fibre material to override")
        fibre = replace(fibre, **m.fibre)
    interface = replace(base.interface, **m.interface) if m.interface else base.interface
    return MaterialCatalog(
        name=base.name,
        matrix=matrix,
        interface=interface,
        fibre=fibre,
        exponent=cfg.physics.exponent,
    )


def build_schedule(cfg: ScenarioConfig) -> StageSchedule:
    scale = cfg.numerics.dt_scale
    stages = tuple(
        Stage(
            name=st.name,
            duration=st.duration,
            dt=st.dt * scale,
            moisture=MoistureBC(dirichlet=st.dirichlet, flux=st.flux),
            mechanical=MechanicalBC(entries=st.mechanical),
            dt_growth=st.dt_growth,
            dt_max=None if st.dt_max is None else st.dt_max * scale,
            snapshot_every=st.snapshot_every,
            freeze_moisture=st.freeze_moisture,
        )
        for st in cfg.schedule.stages
    )
    return StageSchedule(stages=stages, initial_concentration=cfg.schedule.initial_concentration)


def build_settings(cfg: ScenarioConfig) -> SolverSettings:
    p, n = cfg.physics, cfg.numerics
    return SolverSettings(
        length_scale=p.length_scale,
        indicator_length_scale=p.indicator_length_scale,
        kappa=p.kappa,
        C0=p.C0,
        split_mode=p.split_modulus,
        multi_pass=n.multi_pass,
        multi_pass_tol=n.multi_pass_tol,
        multi_pass_max=n.multi_pass_max,
        max_halvings=n.max_halvings,
        solver=n.solver,
        lumped_capacity=n.lumped_capacity,
    )


def build_observables(cfg: ScenarioConfig) -> Observables:
    o = cfg.observables
    return Observables(
        reaction_set=o.reaction_set,
        reaction_component=o.reaction_component,
        elongation_set=o.elongation_set,
        elongation_component=o.elongation_component,
        thickness=cfg.physics.thickness,
    )
