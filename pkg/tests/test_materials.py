"""
Material catalog and constitutive laws (stiffness, swelling, energy split, degradation).
"""

import numpy as np
import pytest

from src.materials import (
    DEFAULT_KAPPA,
    FLAX_EPOXY,
    ElasticParams,
    HygroParams,
    MaterialError,
    PhaseMaterial,
    degradation,
    degraded_stress,
    get_catalog,
    hygroscopic_strain,
    plane_strain_stiffness,
    split_energy,
    split_energy_isotropic,
    update_history,
)
from src.materials.constitutive import stress


@pytest.fixture
def epoxy():
    return ElasticParams.from_material(FLAX_EPOXY.matrix)


@pytest.fixture
def flax():
    return ElasticParams.from_material(FLAX_EPOXY.fibre)


def direct_split(eps, lam, mu, mode="bulk"):
    """Term-by-term evaluation on the full 3x3 strain tensor with eps_zz = 0."""
    tensor = np.array([[eps[0], eps[2] / 2, 0.0], [eps[2] / 2, eps[1], 0.0], [0.0, 0.0, 0.0]])
    tr = np.trace(tensor)
    dev = tensor - tr / 3 * np.eye(3)
    k = lam + 2 * mu / 3 if mode == "bulk" else lam
    plus = 0.5 * k * max(tr, 0.0) ** 2 + mu * np.sum(dev * dev)
    minus = 0.5 * k * min(tr, 0.0) ** 2
    return plus, minus


class TestCatalog:
    def test_flax_epoxy_values(self):
        assert FLAX_EPOXY.matrix.E11 == 3600.0
        assert FLAX_EPOXY.fibre.fracture_toughness == 2.1
        assert FLAX_EPOXY.interface.diffusivity == pytest.approx(0.8e-6)

    def test_lookup(self):
        assert get_catalog("flax-epoxy") is FLAX_EPOXY
        with pytest.raises(MaterialError, match="glass-epoxy"):
            get_catalog("glass-epoxy")

    def test_region_lookup(self):
        assert FLAX_EPOXY.material_for_region(-1) is FLAX_EPOXY.matrix
        assert FLAX_EPOXY.material_for_region(3) is FLAX_EPOXY.fibre

    def test_fibre_diffusivity_override(self):
        catalog = FLAX_EPOXY.with_fibre_diffusivity(3.47e-4)
        assert catalog.fibre.diffusivity == 3.47e-4
        assert FLAX_EPOXY.fibre.diffusivity == 1.19e-6

    @pytest.mark.parametrize(
        "field,value",
        [("E11", -1.0), ("fracture_toughness", 0.0), ("diffusivity", -1e-6), ("nu12", 0.5)],
    )
    def test_invalid_parameters(self, field, value):
        kwargs = dict(
            name="bad", E11=1.0, E22=1.0, nu12=0.3, nu23=0.3,
            fracture_toughness=1.0, diffusivity=1.0, alpha11=0.0, alpha22=0.0,
        )
        kwargs[field] = value
        with pytest.raises(MaterialError, match=field):
            PhaseMaterial(**kwargs)

    def test_default_transverse_shear_modulus(self):
        assert FLAX_EPOXY.fibre.shear_modulus == pytest.approx(5100.0 / (2 * 1.41))


class TestStiffness:
    def test_epoxy_plane_strain_c11(self, epoxy):
        C = plane_strain_stiffness(epoxy)
        assert C[0, 0] == pytest.approx(3600 * 0.6 / (1.4 * 0.2), rel=1e-12)
        assert C[0, 0] == pytest.approx(7714.29, abs=0.01)
        assert C[2, 2] == pytest.approx(3600 / 2.8)

    def test_isotropic_matches_lame_form(self, epoxy):
        lam, mu = epoxy.lame
        expected = np.array([[lam + 2 * mu, lam, 0], [lam, lam + 2 * mu, 0], [0, 0, mu]])
        assert np.allclose(plane_strain_stiffness(epoxy), expected)

    def test_rotation_periodicity(self, flax):
        a = plane_strain_stiffness(flax)
        b = plane_strain_stiffness(ElasticParams(**{**flax.__dict__, "theta": 360.0}))
        assert np.allclose(a, b, rtol=1e-12, atol=1e-9)

    def test_quarter_turn_swaps_axes(self, flax):
        a = plane_strain_stiffness(flax)
        b = plane_strain_stiffness(ElasticParams(**{**flax.__dict__, "theta": 90.0}))
        assert b[0, 0] == pytest.approx(a[1, 1])
        assert b[1, 1] == pytest.approx(a[0, 0])
        assert b[0, 1] == pytest.approx(a[0, 1])

    def test_isotropic_rotation_invariant(self, epoxy):
        rotated = ElasticParams(**{**epoxy.__dict__, "theta": 37.0})
        assert np.allclose(plane_strain_stiffness(epoxy), plane_strain_stiffness(rotated))

    def test_unstable_parameters_rejected(self):
        with pytest.raises(MaterialError):
            plane_strain_stiffness(ElasticParams(E11=1.0, E22=1000.0, nu12=0.49, nu23=0.49))


class TestHygroscopicStrain:
    def test_reference_concentration_gives_zero(self):
        eps = hygroscopic_strain(0.03, HygroParams(0.6, 0.6, C0=0.03))
        assert np.allclose(eps, 0.0)

    def test_epoxy_saturated(self):
        eps = hygroscopic_strain(0.0745, HygroParams.from_material(FLAX_EPOXY.matrix))
        assert eps == pytest.approx([0.0447, 0.0447, 0.0])

    def test_flax_along_fibre(self):
        eps = hygroscopic_strain(0.0745, HygroParams.from_material(FLAX_EPOXY.fibre), theta=0.0)
        assert eps == pytest.approx([0.07897, 0.063325, 0.0])

    def test_flax_across_fibre(self):
        eps = hygroscopic_strain(0.0745, HygroParams.from_material(FLAX_EPOXY.fibre), theta=90.0)
        assert eps == pytest.approx([0.063325, 0.07897, 0.0], abs=1e-12)

    def test_vectorised_shape(self):
        eps = hygroscopic_strain(np.zeros((4, 3)), HygroParams(1.0, 0.5))
        assert eps.shape == (4, 3, 3)


class TestEnergySplit:
    def test_hydrostatic_compression_has_no_tensile_part(self, epoxy):
        plus, minus = split_energy(np.array([-1e-3, -1e-3, 0.0]), epoxy, eps_zz=-1e-3)
        assert plus == pytest.approx(0.0, abs=1e-18)
        assert minus > 0

    def test_pure_shear_has_no_compressive_part(self, epoxy):
        plus, minus = split_energy(np.array([0.0, 0.0, 2e-3]), epoxy)
        assert minus == 0.0
        assert plus > 0

    @pytest.mark.parametrize("mode", ["bulk", "lame"])
    def test_uniaxial_matches_direct_evaluation(self, epoxy, mode):
        eps = np.array([1e-3, 0.0, 0.0])
        lam, mu = epoxy.lame
        plus, minus = split_energy_isotropic(eps, lam, mu, mode=mode)
        expected_plus, expected_minus = direct_split(eps, lam, mu, mode)
        assert plus == pytest.approx(expected_plus, rel=1e-12)
        assert minus == pytest.approx(expected_minus, abs=1e-20)

    def test_bulk_split_adds_up_to_total_energy(self, epoxy):
        rng = np.random.default_rng(5)
        eps = rng.normal(scale=1e-3, size=(50, 3))
        plus, minus = split_energy(eps, epoxy)
        C = plane_strain_stiffness(epoxy)
        total = 0.5 * np.einsum("ni,ni->n", eps, stress(eps, C))
        assert np.allclose(plus + minus, total, rtol=1e-10)

    def test_anisotropic_split_conserves_energy(self, flax):
        eps = np.array([1e-3, -2e-3, 5e-4])
        plus, minus = split_energy(eps, flax)
        C = plane_strain_stiffness(flax)
        assert plus + minus == pytest.approx(0.5 * eps @ C @ eps)
        assert plus >= 0 and minus >= 0

    def test_unknown_mode(self, epoxy):
        with pytest.raises(MaterialError):
            split_energy(np.zeros(3), epoxy, mode="spectral")


class TestDegradation:
    def test_intact(self):
        sigma = np.array([10.0, -5.0, 2.0])
        assert degraded_stress(sigma, 0.0) == pytest.approx((1 + DEFAULT_KAPPA) * sigma)

    def test_broken(self):
        sigma = np.array([10.0, -5.0, 2.0])
        assert degraded_stress(sigma, 1.0) == pytest.approx(1e-7 * sigma)

    def test_half_damage(self):
        assert degradation(0.5) == pytest.approx(0.25 + DEFAULT_KAPPA)


class TestHistory:
    @pytest.mark.parametrize("old,psi,expected", [(0.0, 5.0, 5.0), (5.0, 3.0, 5.0)])
    def test_update(self, old, psi, expected):
        assert update_history(old, psi) == expected

    def test_running_maximum(self):
        rng = np.random.default_rng(0)
        psi = rng.uniform(0, 10, 30)
        history = 0.0
        for k, value in enumerate(psi):
            history = update_history(history, value)
            assert history == pytest.approx(psi[: k + 1].max())
