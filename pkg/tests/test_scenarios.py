"""
Full scenario runs at desk resolution.

Every test here is marked slow; run with ``./start.sh test --all``.
"""

from dataclasses import replace

import numpy as np
import pytest

from src.scenarios import preset, run_scenario
from src.scenarios.config import (
    OutputConfig,
    build_catalog,
    build_mesh,
    build_observables,
    build_schedule,
    build_settings,
)
from src.solvers import StaggeredSimulation

pytestmark = pytest.mark.slow

PHI_BOUND = 1.0 + 1e-8


def forces(records, stage):
    return np.array([abs(float(r["reaction_force_N"])) for r in records if r["stage"] == stage])


def elongations(records, stage):
    return np.array([float(r["elongation_mm"]) for r in records if r["stage"] == stage])


def assert_bounded(result):
    assert max(float(r["max_damage"]) for r in result.records) <= PHI_BOUND
    assert result.summary.peak_damage <= PHI_BOUND


@pytest.fixture(scope="module")
def run_preset(tmp_path_factory):
    cache = {}

    def run(name, variant=None):
        key = (name, variant)
        if key not in cache:
            cfg = preset(name, variant)
            cfg = replace(cfg, output=OutputConfig(vtk=False))
            out = tmp_path_factory.mktemp(cfg.name)
            cache[key], _ = run_scenario(cfg, out)
        return cache[key]

    return run


class TestSingleFibre:
    @pytest.fixture(scope="class")
    def run(self):
        cfg = preset("single_fibre")
        mesh, _ = build_mesh(cfg)
        simulation = StaggeredSimulation(
            mesh, build_catalog(cfg), build_schedule(cfg), build_settings(cfg), build_observables(cfg)
        )
        snapshots = []
        result = simulation.run(on_snapshot=snapshots.append)
        return result, snapshots

    def test_force_rises_then_plateaus(self, run):
        result, _ = run
        wet = forces(result.records, "wet")
        peak = wet.max()
        assert peak > 0
        assert np.all(np.diff(wet) >= -1e-3 * peak)
        # last wet increment is 20 s
        assert abs(wet[-1] - wet[-2]) * (100.0 / 20.0) < 0.01 * peak

    def test_force_decays_while_drying(self, run):
        result, _ = run
        peak = forces(result.records, "wet").max()
        dry = forces(result.records, "dry")
        assert dry[-1] < 0.1 * peak

    def test_damage_peaks_at_interface(self, run):
        _, snapshots = run
        wet_end = next(s for s in snapshots if s.time == pytest.approx(2000.0))
        assert wet_end.indicator[np.argmax(wet_end.phi)] > 0.5

    def test_damage_frozen_while_drying(self, run):
        _, snapshots = run
        wet_end = next(s for s in snapshots if s.time == pytest.approx(2000.0))
        final = snapshots[-1]
        assert final.time == pytest.approx(7000.0)
        assert np.allclose(final.phi, wet_end.phi, rtol=1e-3, atol=1e-6)

    def test_damage_never_heals(self, run):
        result, snapshots = run
        for before, after in zip(snapshots, snapshots[1:]):
            assert np.all(after.phi >= before.phi)
        assert_bounded(result)


class TestMultiFibre:
    def test_square_and_random_arrays_agree(self, run_preset):
        sa = run_preset("multi_fibre_sa")
        rd = run_preset("multi_fibre_rd")
        f_sa = forces(sa.records, "wet").max()
        f_rd = forces(rd.records, "wet").max()
        assert abs(f_sa - f_rd) / f_sa < 0.02
        assert_bounded(sa)
        assert_bounded(rd)


class TestPly:
    def test_expansion_at_saturation(self, run_preset):
        result = run_preset("ply")
        assert elongations(result.records, "wet").max() == pytest.approx(0.63, rel=0.1)

    def test_shape_recovered_after_drying(self, run_preset):
        result = run_preset("ply")
        assert elongations(result.records, "dry")[-1] < 0.05
        assert_bounded(result)


class TestLaminate:
    def test_elongation_at_saturation(self, run_preset):
        result = run_preset("laminate")
        assert elongations(result.records, "wet").max() == pytest.approx(0.61, rel=0.1)

    def test_longitudinal_plies_damage_more(self, run_preset):
        result = run_preset("laminate")
        by_angle = result.summary.peak_damage_by_orientation
        assert by_angle[0.0] >= by_angle[90.0]
        assert_bounded(result)


class TestCrackedPlate:
    def test_load_drops_after_peak(self, run_preset):
        load = forces(run_preset("secp_plate", "no_moisture").records, "load")
        peak = load.max()
        assert np.any(np.diff(load) < -0.01 * peak)

    def test_absorbed_moisture_lowers_peak_load(self, run_preset):
        dry = forces(run_preset("secp_plate", "no_moisture").records, "load").max()
        wet = forces(run_preset("secp_plate", "absorbed").records, "load").max()
        assert wet <= dry

    @pytest.mark.parametrize("variant", ["no_moisture", "absorbed"])
    def test_damage_bounded(self, run_preset, variant):
        assert_bounded(run_preset("secp_plate", variant))
