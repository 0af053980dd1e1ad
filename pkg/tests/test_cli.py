"""
Command-line entry point.
"""

from pathlib import Path

import pandas as pd
import pytest

from src.scenarios import cli
from src.scenarios.cli import EXIT_ABORTED, EXIT_CONFIG, EXIT_OK, main, output_directory
from src.scenarios.presets import preset
from src.solvers import TIMESERIES_COLUMNS, SimulationAborted

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


class TestCommands:
    def test_list_presets(self, capsys):
        assert main(["list-presets"]) == EXIT_OK
        out = capsys.readouterr().out
        for name in ("single_fibre", "secp_plate", "laminate"):
            assert name in out
        assert "no_moisture" in out

    def test_validate_preset(self, capsys):
        assert main(["validate", "secp_plate", "--variant", "dried"]) == EXIT_OK
        assert "OK secp_plate_dried" in capsys.readouterr().out

    def test_validate_file(self, capsys):
        assert main(["validate", str(CONFIG_DIR / "single_fibre.yaml")]) == EXIT_OK

    def test_validate_broken_file(self, capsys):
        assert main(["validate", str(CONFIG_DIR / "invalid_example.yaml")]) == EXIT_CONFIG
        err = capsys.readouterr().err
        assert "materials.matrix.fracture_toughness" in err
        assert "line 12" in err

    def test_unknown_preset(self, capsys):
        assert main(["run", "double_fibre"]) == EXIT_CONFIG
        assert "neither a preset" in capsys.readouterr().err

    def test_invalid_override(self, capsys, tmp_path):
        code = main(["run", str(CONFIG_DIR / "swelling_square.yaml"), "--dt-scale", "-1", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG
        assert "numerics.dt_scale" in capsys.readouterr().err

    def test_oracle(self, capsys):
        assert main(["oracle", "at2-homogeneous"]) == EXIT_OK
        assert capsys.readouterr().out.startswith("PASS at2-homogeneous")

    def test_unknown_oracle_rejected_by_parser(self):
        with pytest.raises(SystemExit):
            main(["oracle", "patch-test"])

    def test_quiet_and_verbose_are_exclusive(self):
        with pytest.raises(SystemExit):
            main(["list-presets", "-q", "-v"])


class TestRun:
    def test_run_writes_outputs(self, capsys, tmp_path):
        assert main(["run", str(CONFIG_DIR / "swelling_square.yaml"), "--out", str(tmp_path), "-q"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "scenario: swelling_square" in out
        assert f"output: {tmp_path}" in out
        assert len(sorted(tmp_path.glob("snapshot_*.vtk"))) == 3
        frame = pd.read_csv(tmp_path / "timeseries.csv")
        assert list(frame.columns) == list(TIMESERIES_COLUMNS)
        assert len(frame) == 11
        assert (tmp_path / "summary.txt").exists()
        assert (tmp_path / "config.yaml").exists()

    def test_saved_config_reruns(self, tmp_path):
        first = tmp_path / "first"
        second = tmp_path / "second"
        assert main(["run", str(CONFIG_DIR / "swelling_square.yaml"), "--out", str(first), "-q"]) == EXIT_OK
        assert main(["run", str(first / "config.yaml"), "--out", str(second), "-q"]) == EXIT_OK
        assert (first / "timeseries.csv").read_bytes() == (second / "timeseries.csv").read_bytes()

    def test_aborted_run(self, capsys, monkeypatch, tmp_path):
        def abort(self, on_snapshot=None):
            raise SimulationAborted("Step failed after 6 halvings", {"stage": "wet", "dt": 0.9375})

        monkeypatch.setattr(cli.StaggeredSimulation, "run", abort)
        code = main(["run", str(CONFIG_DIR / "swelling_square.yaml"), "--out", str(tmp_path), "-q"])
        assert code == EXIT_ABORTED
        err = capsys.readouterr().err
        assert "Simulation aborted" in err
        assert "stage: wet" in err

    @pytest.mark.slow
    def test_single_fibre_preset(self, tmp_path):
        code = main(["run", "single_fibre", "--mesh-scale", "4", "--dt-scale", "10", "--out", str(tmp_path), "-q"])
        assert code == EXIT_OK
        assert len(list(tmp_path.glob("snapshot_*.vtk"))) >= 3
        frame = pd.read_csv(tmp_path / "timeseries.csv")
        assert frame["time_s"].iloc[-1] == pytest.approx(7000.0)
        assert frame["max_damage"].is_monotonic_increasing


def test_output_directory_precedence(monkeypatch, tmp_path):
    cfg = preset("single_fibre")
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path))
    assert output_directory(cfg) == tmp_path / "single_fibre"
    assert output_directory(cfg, "elsewhere") == Path("elsewhere")
    monkeypatch.delenv(cli.OUTPUT_ENV)
    assert output_directory(cfg) == Path("results") / "single_fibre"
