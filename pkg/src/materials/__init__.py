"""Material catalog and plane-strain constitutive laws."""

from .catalog import (
    BUILTIN_CATALOGS,
    FLAX_EPOXY,
    FLAX_EPOXY_SATURATION,
    InterfaceMaterial,
    MaterialCatalog,
    MaterialError,
    PhaseMaterial,
    get_catalog,
)
from .constitutive import (
    DEFAULT_KAPPA,
    ElasticParams,
    HygroParams,
    degradation,
    degraded_stress,
    hygroscopic_strain,
    plane_strain_stiffness,
    split_energy,
    split_energy_isotropic,
    update_history,
)

__all__ = [
    "BUILTIN_CATALOGS",
    "DEFAULT_KAPPA",
    "FLAX_EPOXY",
    "FLAX_EPOXY_SATURATION",
    "ElasticParams",
    "HygroParams",
    "InterfaceMaterial",
    "MaterialCatalog",
    "MaterialError",
    "PhaseMaterial",
    "degradation",
    "degraded_stress",
    "get_catalog",
    "hygroscopic_strain",
    "plane_strain_stiffness",
    "split_energy",
    "split_energy_isotropic",
    "update_history",
]
