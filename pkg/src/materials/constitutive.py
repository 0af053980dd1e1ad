"""
Plane-strain constitutive laws.

Strains and stresses use Voigt vectors ``[xx, yy, xy]`` with engineering
shear strain. All functions accept arrays with any leading shape, so they are
evaluated for every quadrature point of a mesh in one call.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .catalog import MaterialError, PhaseMaterial

logger = logging.getLogger(__name__)

# Residual stiffness fraction of a fully broken point.
DEFAULT_KAPPA = 1e-7
SPLIT_MODES = ("bulk", "lame")


@dataclass(frozen=True)
class ElasticParams:
    """
    Elastic constants of a phase plus its in-plane fibre-axis angle (degrees).

    Axis 1 is the fibre axis, 2 the in-plane transverse axis and 3 the
    out-of-plane axis (zero strain).
    """

    E11: float
    E22: float
    nu12: float
    nu23: float
    theta: float = 0.0
    G12: float | None = None

    @classmethod
    def isotropic(cls, E: float, nu: float) -> "ElasticParams":
        return cls(E11=E, E22=E, nu12=nu, nu23=nu)

    @classmethod
    def from_material(cls, material: PhaseMaterial, theta: float = 0.0) -> "ElasticParams":
        return cls(
            E11=material.E11,
            E22=material.E22,
            nu12=material.nu12,
            nu23=material.nu23,
            theta=theta,
            G12=material.G12,
        )

    @property
    def is_isotropic(self) -> bool:
        return self.E11 == self.E22 and self.nu12 == self.nu23 and self.G12 is None

    @property
    def lame(self) -> tuple[float, float]:
        """Isotropic-equivalent ``(lambda, mu)`` from the transverse pair ``(E22, nu23)``."""
        E, nu = self.E22, self.nu23
        lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
        mu = E / (2.0 * (1.0 + nu))
        return lam, mu


@dataclass(frozen=True)
class HygroParams:
    """Swelling coefficients along and across the fibre axis and the reference concentration."""

    alpha11: float
    alpha22: float
    C0: float = 0.0

    @classmethod
    def from_material(cls, material: PhaseMaterial, C0: float = 0.0) -> "HygroParams":
        return cls(alpha11=material.alpha11, alpha22=material.alpha22, C0=C0)


def rotation_matrix(theta_deg: float) -> np.ndarray:
    """Strain transformation from global to material axes (engineering shear)."""
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    return np.array(
        [
            [c * c, s * s, c * s],
            [s * s, c * c, -c * s],
            [-2 * c * s, 2 * c * s, c * c - s * s],
        ]
    )


def material_stiffness(params: ElasticParams) -> np.ndarray:
    """Plane-strain stiffness in material axes, from the inverted 3D compliance."""
    E1, E2, nu12, nu23 = params.E11, params.E22, params.nu12, params.nu23
    G12 = params.G12 if params.G12 is not None else E2 / (2.0 * (1.0 + nu23))
    # normal block of the compliance, order (1, 2, 3)
    S = np.array(
        [
            [1 / E1, -nu12 / E1, -nu12 / E1],
            [-nu12 / E1, 1 / E2, -nu23 / E2],
            [-nu12 / E1, -nu23 / E2, 1 / E2],
        ]
    )
    try:
        C3 = np.linalg.inv(S)
    except np.linalg.LinAlgError as exc:
        raise MaterialError(f"Singular compliance for {params}") from exc
    C = np.zeros((3, 3))
    C[:2, :2] = C3[:2, :2]
    C[2, 2] = G12
    return C


def plane_strain_stiffness(params: ElasticParams) -> np.ndarray:
    """
    3x3 plane-strain stiffness rotated to global axes by ``params.theta``.

    Raises:
        MaterialError: When the result is not symmetric positive definite.
    """
    C = material_stiffness(params)
    T = rotation_matrix(params.theta)
    C_glob = T.T @ C @ T
    C_glob = 0.5 * (C_glob + C_glob.T)
    eig = np.linalg.eigvalsh(C_glob)
    if not np.all(eig > 0):
        raise MaterialError(f"Plane-strain stiffness is not positive definite (eigenvalues {eig})")
    return C_glob


def hygroscopic_strain(C: np.ndarray | float, params: HygroParams, theta: np.ndarray | float = 0.0) -> np.ndarray:
    """
    In-plane eigenstrain ``diag(alpha11, alpha22) (C - C0)`` rotated to global axes.

    Returns:
        Array of shape ``C.shape + (3,)``.
    """
    dC = np.asarray(C, dtype=float) - params.C0
    t = np.radians(np.asarray(theta, dtype=float))
    c, s = np.cos(t), np.sin(t)
    e1 = params.alpha11 * dC
    e2 = params.alpha22 * dC
    return np.stack(
        np.broadcast_arrays(c * c * e1 + s * s * e2, s * s * e1 + c * c * e2, 2 * c * s * (e1 - e2)),
        axis=-1,
    )


def hygroscopic_strain_fields(
    C: np.ndarray, alpha11: np.ndarray, alpha22: np.ndarray, theta: np.ndarray, C0: float = 0.0
) -> np.ndarray:
    """Point-wise eigenstrain when the coefficients vary in space (diffuse interface)."""
    dC = np.asarray(C) - C0
    t = np.radians(theta)
    c, s = np.cos(t), np.sin(t)
    e1, e2 = alpha11 * dC, alpha22 * dC
    return np.stack([c * c * e1 + s * s * e2, s * s * e1 + c * c * e2, 2 * c * s * (e1 - e2)], axis=-1)


def stress(eps: np.ndarray, stiffness: np.ndarray) -> np.ndarray:
    """Undamaged stress ``C eps``; ``stiffness`` is ``(3, 3)`` or matches eps' leading shape."""
    return np.einsum("...ij,...j->...i", stiffness, eps)


def _volumetric_deviatoric(eps: np.ndarray, eps_zz: np.ndarray | float):
    exx, eyy, gxy = eps[..., 0], eps[..., 1], eps[..., 2]
    tr = exx + eyy + eps_zz
    m = tr / 3.0
    dev_sq = (exx - m) ** 2 + (eyy - m) ** 2 + (eps_zz - m) ** 2 + 0.5 * gxy**2
    return tr, dev_sq


def split_energy_isotropic(
    eps: np.ndarray,
    lam: float | np.ndarray,
    mu: float | np.ndarray,
    eps_zz: np.ndarray | float = 0.0,
    mode: str = "bulk",
) -> tuple[np.ndarray, np.ndarray]:
    """
    Volumetric-deviatoric split of the strain energy density.

    ``mode="bulk"`` weighs the volumetric part with ``K = lambda + 2 mu / 3`` so the
    two parts add up to ``1/2 eps:C:eps``; ``mode="lame"`` uses ``lambda``.
    """
    if mode not in SPLIT_MODES:
        raise MaterialError(f"Unknown split mode '{mode}' (expected one of {SPLIT_MODES})")
    tr, dev_sq = _volumetric_deviatoric(np.asarray(eps, dtype=float), eps_zz)
    k = lam + 2.0 * mu / 3.0 if mode == "bulk" else lam
    pos = np.maximum(tr, 0.0)
    neg = np.minimum(tr, 0.0)
    psi_plus = 0.5 * k * pos**2 + mu * dev_sq
    psi_minus = 0.5 * k * neg**2
    return psi_plus, psi_minus


def split_energy(
    eps: np.ndarray,
    params: ElasticParams,
    eps_zz: np.ndarray | float = 0.0,
    mode: str = "bulk",
) -> tuple[np.ndarray, np.ndarray]:
    """
    Tensile and compressive energy parts ``(psi_plus, psi_minus)`` of an elastic strain.

    Anisotropic phases keep the compressive volumetric part of their isotropic
    fit and assign the rest of the true energy ``1/2 eps:C:eps`` to ``psi_plus``.
    """
    lam, mu = params.lame
    if params.is_isotropic:
        return split_energy_isotropic(eps, lam, mu, eps_zz=eps_zz, mode=mode)
    C = plane_strain_stiffness(params)
    return split_energy_anisotropic(eps, C, lam, mu, eps_zz=eps_zz, mode=mode)


def split_energy_anisotropic(
    eps: np.ndarray,
    stiffness: np.ndarray,
    lam: float | np.ndarray,
    mu: float | np.ndarray,
    eps_zz: np.ndarray | float = 0.0,
    mode: str = "bulk",
) -> tuple[np.ndarray, np.ndarray]:
    eps = np.asarray(eps, dtype=float)
    psi0 = 0.5 * np.einsum("...i,...i->...", eps, stress(eps, stiffness))
    _, psi_minus = split_energy_isotropic(eps, lam, mu, eps_zz=eps_zz, mode=mode)
    return np.maximum(psi0 - psi_minus, 0.0), psi_minus


def degradation(phi: np.ndarray | float, kappa: float = DEFAULT_KAPPA) -> np.ndarray:
    """``(1 - phi)^2 + kappa``."""
    return (1.0 - np.asarray(phi, dtype=float)) ** 2 + kappa


def degraded_stress(sigma0: np.ndarray, phi: np.ndarray | float, kappa: float = DEFAULT_KAPPA) -> np.ndarray:
    """Scale the undamaged stress by the degradation function."""
    return degradation(phi, kappa)[..., None] * np.asarray(sigma0, dtype=float)


def update_history(history_old: np.ndarray | float, psi_plus: np.ndarray | float) -> np.ndarray:
    """Running maximum of the tensile energy."""
    return np.maximum(history_old, psi_plus)
