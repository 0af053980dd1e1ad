"""Analytic references and verification runs."""

from .analytic import (
    at2_homogeneous,
    fd_jacobian_check,
    free_swelling_elongation,
    mixture_bounds,
    screened_poisson_decay,
    semi_infinite_diffusion,
    slab_diffusion_fd,
    slab_diffusion_series,
)
from .reports import ORACLES, OracleReport, matrix_only_catalog, run_oracle

__all__ = [
    "ORACLES",
    "OracleReport",
    "at2_homogeneous",
    "fd_jacobian_check",
    "free_swelling_elongation",
    "matrix_only_catalog",
    "mixture_bounds",
    "run_oracle",
    "screened_poisson_decay",
    "semi_infinite_diffusion",
    "slab_diffusion_fd",
    "slab_diffusion_series",
]
