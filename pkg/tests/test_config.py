"""
Scenario YAML parsing, validation, serialization and builders.
"""

import math
from pathlib import Path

import pytest

from src.scenarios.config import (
    ConfigError,
    build_catalog,
    build_mesh,
    build_schedule,
    build_settings,
    dump_config,
    load_config,
    mesh_size,
    parse_config,
    save_config,
    validate_config,
    with_overrides,
)
from src.scenarios.presets import preset

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

MINIMAL = """
name: tiny
geometry:
  width: 0.02
  height: 0.02
  h: 0.002
physics:
  length_scale: 0.004
schedule:
  stages:
    - name: wet
      duration: 100.0
      dt: 10.0
      dirichlet:
        - {node_set: left, value: 0.0745}
"""


def issue_paths(exc_info):
    return [issue.path for issue in exc_info.value.issues]


class TestParse:
    def test_minimal_document(self):
        cfg = parse_config(MINIMAL)
        assert cfg.name == "tiny"
        assert cfg.geometry.fibres.kind == "none"
        assert cfg.schedule.stages[0].dirichlet[0].value == 0.0745
        assert cfg.schedule.stages[0].dirichlet[0].end == math.inf

    def test_exponent_without_dot(self):
        cfg = parse_config(MINIMAL.replace("length_scale: 0.004", "length_scale: 4e-3"))
        assert cfg.physics.length_scale == pytest.approx(0.004)

    def test_yaml_syntax_error_has_line(self):
        with pytest.raises(ConfigError) as info:
            parse_config("name: x\ngeometry: [1, 2\n")
        assert info.value.issues[0].line is not None
        assert "YAML syntax error" in str(info.value)

    def test_unknown_key_is_located(self):
        text = MINIMAL.replace("  h: 0.002", "  h: 0.002\n  depth: 1.0")
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        issue = info.value.issues[0]
        assert issue.path == "geometry.depth"
        assert issue.line == 7
        assert "unknown key" in issue.message

    def test_wrong_type(self):
        with pytest.raises(ConfigError) as info:
            parse_config(MINIMAL.replace("h: 0.002", "h: fine"))
        assert issue_paths(info) == ["geometry.h"]
        assert "expected float" in str(info.value)

    def test_negative_toughness_names_key_and_line(self):
        with pytest.raises(ConfigError) as info:
            load_config(CONFIG_DIR / "invalid_example.yaml")
        paths = issue_paths(info)
        assert "materials.matrix.fracture_toughness" in paths
        assert "schedule.stages[0].dirichlet[0].node_set" in paths
        toughness = next(i for i in info.value.issues if i.path == "materials.matrix.fracture_toughness")
        assert toughness.line == 12
        assert "line 12" in str(info.value)

    def test_all_issues_reported_together(self):
        text = MINIMAL.replace("length_scale: 0.004", "length_scale: -1.0").replace(
            "duration: 100.0", "duration: 0.0"
        )
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert set(issue_paths(info)) >= {"physics.length_scale", "schedule.stages[0].duration"}

    def test_invalid_mechanical_component(self):
        text = MINIMAL + "      mechanical:\n        - {node_set: top, component: z}\n"
        with pytest.raises(ConfigError, match="component"):
            parse_config(text)

    def test_unknown_material_property(self):
        text = MINIMAL + "materials:\n  fibre:\n    stiffness: 1.0\n"
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert issue_paths(info) == ["materials.fibre.stiffness"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.yaml")

    def test_example_configs_load(self):
        assert load_config(CONFIG_DIR / "single_fibre.yaml").name == "single_fibre"
        assert load_config(CONFIG_DIR / "swelling_square.yaml").name == "swelling_square"


class TestSerialization:
    def test_round_trip(self, tmp_path):
        cfg = preset("secp_plate", "dried")
        path = save_config(cfg, tmp_path / "config.yaml")
        assert load_config(path) == cfg

    def test_dump_is_stable(self):
        cfg = parse_config(MINIMAL)
        assert dump_config(parse_config(dump_config(cfg))) == dump_config(cfg)


class TestOverrides:
    def test_overrides_replace_only_given_values(self):
        cfg = parse_config(MINIMAL)
        changed = with_overrides(cfg, mesh_scale=2.0, seed=7, fibre_diffusivity=3.47e-4)
        assert changed.numerics.mesh_scale == 2.0
        assert changed.seed == 7
        assert changed.materials.fibre["diffusivity"] == 3.47e-4
        assert changed.numerics.dt_scale == cfg.numerics.dt_scale
        assert with_overrides(cfg) == cfg

    def test_invalid_override_is_caught_by_validation(self):
        cfg = with_overrides(parse_config(MINIMAL), dt_scale=-1.0)
        assert [i.path for i in validate_config(cfg)] == ["numerics.dt_scale"]

    def test_dt_scale_applies_to_schedule(self):
        schedule = build_schedule(with_overrides(parse_config(MINIMAL), dt_scale=0.5))
        assert schedule.stages[0].dt == pytest.approx(5.0)

    def test_fibre_diffusivity_reaches_catalog(self):
        catalog = build_catalog(with_overrides(parse_config(MINIMAL), fibre_diffusivity=3.47e-4))
        assert catalog.fibre.diffusivity == 3.47e-4


class TestBuilders:
    def test_mesh_follows_scale(self):
        cfg = parse_config(MINIMAL)
        mesh, seam = build_mesh(with_overrides(cfg, mesh_scale=2.0))
        assert seam is None
        assert mesh.n_elements == 25

    def test_crack_alignment_reduces_element_size(self):
        cfg = preset("secp_plate", "no_moisture", mesh_scale=4.0)
        h = mesh_size(cfg)
        g = cfg.geometry
        assert h <= g.h * 4.0
        assert (g.crack.y / h) == pytest.approx(round(g.crack.y / h), abs=1e-6)
        nx = math.ceil(g.width / h - 1e-9)
        assert g.crack.length / g.width * nx == pytest.approx(round(g.crack.length / g.width * nx), abs=1e-6)

    def test_cracked_mesh_has_crack_sets(self):
        text = MINIMAL.replace("  h: 0.002", "  h: 0.002\n  crack: {length: 0.01, y: 0.01}")
        mesh, seam = build_mesh(parse_config(text))
        assert seam is not None
        assert len(mesh.node_set("crack_lower")) > 0

    def test_settings(self):
        settings = build_settings(parse_config(MINIMAL))
        assert settings.length_scale == 0.004
        assert settings.split_mode == "bulk"
        assert not settings.multi_pass
