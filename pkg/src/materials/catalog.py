"""
Material catalog for the matrix, fibre and interface phases.

The built-in ``flax-epoxy`` catalog holds the flax fibre / epoxy data used by
all presets. Units: MPa, N/mm, mm^2/s and strain per unit moisture mass
fraction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Dict

logger = logging.getLogger(__name__)

DEFAULT_INTERPOLATION_EXPONENT = 2.0


class MaterialError(ValueError):
    """Raised for invalid material parameters or a region the catalog cannot serve."""


@dataclass(frozen=True)
class PhaseMaterial:
    """
    Bulk phase, transversely isotropic about its fibre axis (1).

    An isotropic phase has ``E11 == E22`` and ``nu12 == nu23``. ``G12`` defaults
    to the transverse shear modulus ``E22 / (2 (1 + nu23))``.
    """

    name: str
    E11: float
    E22: float
    nu12: float
    nu23: float
    fracture_toughness: float
    diffusivity: float
    alpha11: float
    alpha22: float
    G12: float | None = None

    def __post_init__(self):
        for key in ("E11", "E22", "fracture_toughness", "diffusivity"):
            value = getattr(self, key)
            if not value > 0:
                raise MaterialError(f"{self.name}: {key} must be positive (got {value})")
        for key in ("nu12", "nu23"):
            value = getattr(self, key)
            if not -1.0 < value < 0.5:
                raise MaterialError(f"{self.name}: {key} must lie in (-1, 0.5) (got {value})")
        if self.G12 is not None and not self.G12 > 0:
            raise MaterialError(f"{self.name}: G12 must be positive (got {self.G12})")

    @classmethod
    def isotropic(
        cls, name: str, E: float, nu: float, fracture_toughness: float, diffusivity: float, alpha: float
    ) -> "PhaseMaterial":
        return cls(
            name=name,
            E11=E,
            E22=E,
            nu12=nu,
            nu23=nu,
            fracture_toughness=fracture_toughness,
            diffusivity=diffusivity,
            alpha11=alpha,
            alpha22=alpha,
        )

    @property
    def is_isotropic(self) -> bool:
        return self.E11 == self.E22 and self.nu12 == self.nu23 and self.G12 is None

    @property
    def shear_modulus(self) -> float:
        return self.G12 if self.G12 is not None else self.E22 / (2.0 * (1.0 + self.nu23))


@dataclass(frozen=True)
class InterfaceMaterial:
    """Values the diffuse interface interpolates toward; ``alpha`` is isotropic."""

    fracture_toughness: float
    diffusivity: float
    alpha: float

    def __post_init__(self):
        if not self.fracture_toughness > 0:
            raise MaterialError(f"interface: fracture_toughness must be positive (got {self.fracture_toughness})")
        if not self.diffusivity > 0:
            raise MaterialError(f"interface: diffusivity must be positive (got {self.diffusivity})")


@dataclass(frozen=True)
class MaterialCatalog:
    """Matrix, fibre and interface data plus the interpolation exponent ``n``."""

    name: str
    matrix: PhaseMaterial
    interface: InterfaceMaterial
    fibre: PhaseMaterial | None = None
    exponent: float = DEFAULT_INTERPOLATION_EXPONENT

    def __post_init__(self):
        if self.exponent < 1:
            raise MaterialError(f"Interpolation exponent must be >= 1 (got {self.exponent})")

    def material_for_region(self, region: int) -> PhaseMaterial:
        """Bulk material of a region tag (``-1`` matrix, ``k >= 0`` fibre ``k``)."""
        if region < 0:
            return self.matrix
        if self.fibre is None:
            raise MaterialError(f"Catalog '{self.name}' has no fibre material for region {region}")
        return self.fibre

    def with_fibre_diffusivity(self, diffusivity: float) -> "MaterialCatalog":
        if self.fibre is None:
            raise MaterialError(f"Catalog '{self.name}' has no fibre material")
        logger.info("Overriding fibre diffusivity: %.4g -> %.4g mm^2/s", self.fibre.diffusivity, diffusivity)
        return replace(self, fibre=replace(self.fibre, diffusivity=diffusivity))


FLAX_EPOXY = MaterialCatalog(
    name="flax-epoxy",
    matrix=PhaseMaterial.isotropic(
        "epoxy", E=3600.0, nu=0.4, fracture_toughness=1.2, diffusivity=1.45e-6, alpha=0.6
    ),
    fibre=PhaseMaterial(
        name="flax",
        E11=31500.0,
        E22=5100.0,
        nu12=0.28,
        nu23=0.41,
        fracture_toughness=2.1,
        diffusivity=1.19e-6,
        alpha11=1.06,
        alpha22=0.85,
    ),
    interface=InterfaceMaterial(fracture_toughness=0.213, diffusivity=0.8e-6, alpha=0.1),
)

# Saturation moisture content of the flax/epoxy system (mass fraction).
FLAX_EPOXY_SATURATION = 0.0745

BUILTIN_CATALOGS: Dict[str, MaterialCatalog] = {FLAX_EPOXY.name: FLAX_EPOXY}


def get_catalog(name: str) -> MaterialCatalog:
    try:
        return BUILTIN_CATALOGS[name]
    except KeyError:
        raise MaterialError(
            f"Unknown material catalog '{name}' (available: {sorted(BUILTIN_CATALOGS)})"
        ) from None
