"""
Composite domains and fibre layouts.

A layout is a plain description of where the fibre material sits inside a
rectangular domain: circular inclusions for the micro-scale cells, or
horizontal strips for the ply and laminate idealizations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Dart throwing gives up after this many candidate centres per fibre.
MAX_ATTEMPTS_PER_FIBRE = 20_000
# Random packing is refused above this fibre area fraction.
MAX_RANDOM_VOLUME_FRACTION = 0.5


class MeshError(ValueError):
    """Raised when a domain, layout or mesh cannot be built as requested."""


class FibreOverlapError(MeshError):
    """Raised when a regular fibre array does not fit in the domain."""


class PackingError(MeshError):
    """Raised when random placement fails after the bounded number of retries."""

    def __init__(self, message: str, achieved: int):
        super().__init__(message)
        self.achieved = achieved


class LayoutKind(Enum):
    """How the fibres of a layout were generated."""

    NONE = "none"
    SQUARE_ARRAY = "square-array"
    RANDOM = "random"
    STRIPS = "strips"


@dataclass(frozen=True)
class Domain2D:
    """Axis-aligned rectangle, lengths in mm."""

    width: float
    height: float
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.width > 0:
            raise MeshError(f"Domain width must be positive (got {self.width})")
        if not self.height > 0:
            raise MeshError(f"Domain height must be positive (got {self.height})")

    @property
    def x_min(self) -> float:
        return float(self.origin[0])

    @property
    def y_min(self) -> float:
        return float(self.origin[1])

    @property
    def x_max(self) -> float:
        return self.x_min + self.width

    @property
    def y_max(self) -> float:
        return self.y_min + self.height

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x_min + 0.5 * self.width, self.y_min + 0.5 * self.height)


@dataclass(frozen=True)
class Circle:
    """Circular fibre cross-section."""

    x: float
    y: float
    diameter: float

    @property
    def radius(self) -> float:
        return 0.5 * self.diameter

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x - self.x) ** 2 + (y - self.y) ** 2 <= self.radius**2


@dataclass(frozen=True)
class FibreStrip:
    """
    Continuous fibre band spanning the domain width.

    ``orientation`` is the in-plane angle (degrees) of the fibre axis; 0 runs
    along x, 90 along y.
    """

    y_min: float
    y_max: float
    orientation: float = 0.0

    @property
    def thickness(self) -> float:
        return self.y_max - self.y_min

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (y >= self.y_min) & (y <= self.y_max) & np.isfinite(x)


@dataclass(frozen=True)
class FibreLayout:
    """
    Fibre placement inside a domain.

    Circles and strips share one region numbering: circles first, strips
    after them. Region index ``k`` therefore identifies one fibre.
    """

    kind: LayoutKind = LayoutKind.NONE
    circles: Tuple[Circle, ...] = ()
    strips: Tuple[FibreStrip, ...] = ()
    seed: int | None = None
    min_gap: float = 0.0
    orientation: float = 0.0  # fibre axis angle for circular fibres, degrees

    @property
    def n_fibres(self) -> int:
        return len(self.circles) + len(self.strips)

    def fibre_orientation(self, index: int) -> float:
        """Fibre axis angle (degrees) of region ``index``."""
        if index < len(self.circles):
            return self.orientation
        return self.strips[index - len(self.circles)].orientation

    def fibre_area(self, domain: Domain2D) -> float:
        circles = sum(math.pi * c.radius**2 for c in self.circles)
        strips = sum(s.thickness * domain.width for s in self.strips)
        return circles + strips

    def volume_fraction(self, domain: Domain2D) -> float:
        return self.fibre_area(domain) / domain.area

    def centers(self) -> np.ndarray:
        return np.array([[c.x, c.y] for c in self.circles], dtype=float).reshape(-1, 2)


def place_fibres_square_array(
    rows: int, cols: int, d: float, domain: Domain2D
) -> FibreLayout:
    """
    Place ``rows x cols`` fibres on a regular grid, one centred in each cell.

    Raises:
        FibreOverlapError: When the pitch in either direction is smaller than ``d``.
    """
    if rows < 0 or cols < 0:
        raise MeshError(f"rows and cols must be non-negative (got {rows}, {cols})")
    if d <= 0:
        raise MeshError(f"Fibre diameter must be positive (got {d})")
    if rows == 0 or cols == 0:
        return FibreLayout(kind=LayoutKind.SQUARE_ARRAY)

    pitch_x = domain.width / cols
    pitch_y = domain.height / rows
    pitch = min(pitch_x, pitch_y)
    if pitch < d:
        raise FibreOverlapError(
            f"Square array {rows}x{cols} overlaps: pitch {pitch:.6g} mm < diameter {d:.6g} mm"
        )

    circles = tuple(
        Circle(
            x=domain.x_min + (i + 0.5) * pitch_x,
            y=domain.y_min + (j + 0.5) * pitch_y,
            diameter=d,
        )
        for j in range(rows)
        for i in range(cols)
    )
    return FibreLayout(kind=LayoutKind.SQUARE_ARRAY, circles=circles)


def place_fibres_random(
    n: int,
    d: float,
    domain: Domain2D,
    seed: int,
    min_gap: float = 0.0,
    max_attempts_per_fibre: int = MAX_ATTEMPTS_PER_FIBRE,
) -> FibreLayout:
    """
    Seeded dart-throwing placement of ``n`` non-overlapping circles.

    Every circle lies fully inside the domain and every pair of centres is at
    least ``d + min_gap`` apart. The same seed and parameters always yield the
    same layout.

    Raises:
        PackingError: When the target fraction is infeasible or the bounded
            retries are exhausted. ``achieved`` holds the number placed.
    """
    if n < 0:
        raise MeshError(f"Fibre count must be non-negative (got {n})")
    if n == 0:
        return FibreLayout(kind=LayoutKind.RANDOM, seed=seed, min_gap=min_gap)
    if d <= 0:
        raise MeshError(f"Fibre diameter must be positive (got {d})")
    if min_gap < 0:
        raise MeshError(f"min_gap must be non-negative (got {min_gap})")

    fraction = n * math.pi * d**2 / 4.0 / domain.area
    if fraction >= MAX_RANDOM_VOLUME_FRACTION:
        raise PackingError(
            f"Fibre fraction {fraction:.3f} is too high for random packing "
            f"(limit {MAX_RANDOM_VOLUME_FRACTION})",
            achieved=0,
        )

    r = 0.5 * d
    if domain.width < d or domain.height < d:
        raise PackingError("Domain is smaller than one fibre", achieved=0)

    rng = np.random.default_rng(seed)
    min_dist_sq = (d + min_gap) ** 2
    centers = np.empty((n, 2), dtype=float)
    placed = 0
    attempts = 0
    budget = max_attempts_per_fibre * n

    while placed < n and attempts < budget:
        attempts += 1
        cx = rng.uniform(domain.x_min + r, domain.x_max - r)
        cy = rng.uniform(domain.y_min + r, domain.y_max - r)
        if placed:
            dist_sq = (centers[:placed, 0] - cx) ** 2 + (centers[:placed, 1] - cy) ** 2
            if np.any(dist_sq < min_dist_sq):
                continue
        centers[placed] = (cx, cy)
        placed += 1

    if placed < n:
        raise PackingError(
            f"Could only place {placed} of {n} fibres after {attempts} attempts",
            achieved=placed,
        )

    logger.debug("Placed %d random fibres in %d attempts (seed=%d)", n, attempts, seed)
    circles = tuple(Circle(float(x), float(y), d) for x, y in centers)
    return FibreLayout(kind=LayoutKind.RANDOM, circles=circles, seed=seed, min_gap=min_gap)


def place_fibre_strips(
    bands: list[tuple[float, float]] | tuple[tuple[float, float], ...],
    orientations: list[float] | tuple[float, ...] | None = None,
) -> FibreLayout:
    """
    Horizontal fibre strips given as ``(y_min, y_max)`` bands.

    ``orientations`` holds the fibre axis angle of each band (0 by default).
    """
    orientations = list(orientations) if orientations is not None else [0.0] * len(bands)
    if len(orientations) != len(bands):
        raise MeshError("One orientation is required per fibre strip")

    strips = []
    for (y0, y1), theta in zip(bands, orientations):
        if not y1 > y0:
            raise MeshError(f"Fibre strip must have positive thickness (got {y0}..{y1})")
        strips.append(FibreStrip(float(y0), float(y1), float(theta)))

    ordered = sorted(strips, key=lambda s: s.y_min)
    for lower, upper in zip(ordered, ordered[1:]):
        if upper.y_min < lower.y_max:
            raise FibreOverlapError(
                f"Fibre strips overlap: [{lower.y_min}, {lower.y_max}] and "
                f"[{upper.y_min}, {upper.y_max}]"
            )
    return FibreLayout(kind=LayoutKind.STRIPS, strips=tuple(strips))


def min_center_distance(layout: FibreLayout) -> float:
    """Smallest pairwise centre distance of the circular fibres (inf if < 2)."""
    pts = layout.centers()
    if len(pts) < 2:
        return math.inf
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    np.fill_diagonal(dist, np.inf)
    return float(dist.min())
