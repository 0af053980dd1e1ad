"""
Closed-form and brute-force reference solutions.

None of these functions touch the finite-element code paths; they are the
independent side of every verification check.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.special import erfc

SERIES_TERMS = 200
FD_NODES = 400
# Explicit scheme number D dt / dx^2 (stable below 1/2; 1/6 cancels the leading truncation error).
FD_MESH_RATIO = 1.0 / 6.0


def slab_diffusion_series(
    x: np.ndarray | float,
    t: float,
    D: float,
    C_s: float,
    L: float,
    terms: int = SERIES_TERMS,
) -> np.ndarray:
    """
    Slab ``0 <= x <= L`` held at ``C_s`` on ``x = 0`` and insulated at ``x = L``,
    initially dry.

    The truncated series is accurate to ``exp(-(2 terms + 1)^2 pi^2 Fo / 4)``
    for Fourier number ``Fo = D t / L^2``; at ``t <= 0`` the dry state is returned.
    """
    x = np.asarray(x, dtype=float)
    if t <= 0:
        return np.where(x <= 0.0, float(C_s), 0.0)
    k = np.arange(terms)[:, None]
    m = (2 * k + 1) * math.pi
    series = (4.0 / m) * np.sin(m * x.ravel()[None, :] / (2.0 * L)) * np.exp(-(m**2) * D * t / (4.0 * L**2))
    return (C_s * (1.0 - series.sum(axis=0))).reshape(x.shape)


def slab_diffusion_fd(
    x: np.ndarray | float,
    t: float,
    D: float,
    C_s: float,
    L: float,
    n_nodes: int = FD_NODES,
    ratio: float = FD_MESH_RATIO,
) -> np.ndarray:
    """Same slab problem marched with explicit central differences and a ghost node at ``x = L``."""
    x = np.asarray(x, dtype=float)
    dx = L / n_nodes
    dt_nominal = ratio * dx**2 / D
    steps = max(1, math.ceil(t / dt_nominal))
    r = D * (t / steps) / dx**2
    c = np.zeros(n_nodes + 1)
    c[0] = C_s
    for _ in range(steps):
        lap = np.empty_like(c)
        lap[1:-1] = c[:-2] - 2.0 * c[1:-1] + c[2:]
        lap[-1] = 2.0 * (c[-2] - c[-1])
        lap[0] = 0.0
        c = c + r * lap
    grid = np.linspace(0.0, L, n_nodes + 1)
    return np.interp(x, grid, c)


def semi_infinite_diffusion(x: np.ndarray | float, t: float, D: float, C_s: float) -> np.ndarray:
    """``C_s erfc(x / (2 sqrt(D t)))``, valid before the front reaches the far edge."""
    x = np.asarray(x, dtype=float)
    if t <= 0:
        return np.where(x <= 0.0, float(C_s), 0.0)
    return C_s * erfc(x / (2.0 * math.sqrt(D * t)))


def screened_poisson_decay(x: np.ndarray | float, length_scale: float) -> np.ndarray:
    """``exp(-x / l)``, the half-line solution with unit value at the origin."""
    return np.exp(-np.asarray(x, dtype=float) / length_scale)


def at2_homogeneous(psi: np.ndarray | float, fracture_toughness: float, length_scale: float) -> np.ndarray:
    """Uniform damage ``2 l psi / (Gc + 2 l psi)`` under a uniform driving energy ``psi``."""
    psi = np.asarray(psi, dtype=float)
    return 2.0 * length_scale * psi / (fracture_toughness + 2.0 * length_scale * psi)


def free_swelling_elongation(alpha: float, delta_c: float, length: float) -> float:
    """Stress-free elongation of a homogeneous body."""
    return alpha * delta_c * length


def mixture_bounds(alphas: tuple[float, ...], delta_c: float, length: float) -> tuple[float, float]:
    """Elongation range spanned by homogeneous bodies of each constituent."""
    values = [free_swelling_elongation(a, delta_c, length) for a in alphas]
    return min(values), max(values)


def fd_jacobian_check(
    residual: Callable[[np.ndarray], np.ndarray],
    stiffness: np.ndarray,
    x: np.ndarray,
    perturbation: float = 1e-6,
) -> float:
    """
    Compare an analytic stiffness with central differences of the residual.

    Args:
        residual: Maps the state vector to the residual vector.
        stiffness: Analytic Jacobian at ``x`` (dense or sparse).
        x: State at which to differentiate.
        perturbation: Step relative to the state scale ``max(1, |x|_inf)``.

    Returns:
        ``max |K_fd - K| / max |K|``.
    """
    x = np.asarray(x, dtype=float)
    K = stiffness.toarray() if hasattr(stiffness, "toarray") else np.asarray(stiffness, dtype=float)
    h = perturbation * max(1.0, float(np.max(np.abs(x), initial=0.0)))
    K_fd = np.empty_like(K)
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = h
        K_fd[:, j] = (residual(x + step) - residual(x - step)) / (2.0 * h)
    scale = float(np.max(np.abs(K)))
    return float(np.max(np.abs(K_fd - K))) / scale if scale > 0 else float(np.max(np.abs(K_fd)))
