"""
Structured quadrilateral meshes of rectangular composite domains.

A :class:`Mesh` carries node coordinates, connectivity, named node sets and a
region tag per element (``-1`` for matrix, ``k >= 0`` for fibre ``k`` of the
layout). Meshes are never mutated: :func:`classify_regions` and
:func:`insert_edge_crack` return new instances.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from .domain import Domain2D, FibreLayout, MeshError
from .elements import (
    BILINEAR,
    EDGE_NODES,
    SERENDIPITY,
    ElementGeometry,
    nodes_per_element,
    quadrature_id,
)

logger = logging.getLogger(__name__)

MATRIX_REGION = -1
SIDES = ("bottom", "right", "top", "left")
# Local edge index of each side of a structured-grid element.
_SIDE_EDGE = {"bottom": 0, "right": 1, "top": 2, "left": 3}
# Coordinate comparisons are made relative to the element size.
_GEOM_TOL = 1e-6


class CrackAlignmentError(MeshError):
    """Raised when a crack seam does not follow existing mesh lines."""


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Quadrilateral mesh with node sets and per-element region tags.

    Attributes:
        nodes: ``(n, 2)`` coordinates in mm.
        elements: ``(E, nen)`` connectivity, corners counter-clockwise first.
        order: ``"bilinear"`` or ``"serendipity-8"``.
        h: Characteristic element size (largest element edge) in mm.
        node_sets: Named node id arrays (``left``, ``right``, ``top``, ``bottom``,
            ``center``, ``interface`` and, for cracked meshes, ``crack_upper`` /
            ``crack_lower``).
        boundary_faces: Per side, ``(m, 2)`` rows of ``(element, local edge)``.
        regions: ``(E,)`` region tag, ``-1`` for matrix.
        orientations: ``(E,)`` fibre-axis angle in degrees.
    """

    domain: Domain2D
    nodes: np.ndarray
    elements: np.ndarray
    order: str
    h: float
    points_per_axis: int = 2
    node_sets: Dict[str, np.ndarray] = field(default_factory=dict)
    boundary_faces: Dict[str, np.ndarray] = field(default_factory=dict)
    regions: np.ndarray | None = None
    orientations: np.ndarray | None = None
    layout: FibreLayout | None = None

    def __post_init__(self):
        n_elem = self.elements.shape[0]
        if self.regions is None:
            object.__setattr__(self, "regions", np.full(n_elem, MATRIX_REGION, dtype=np.int64))
        if self.orientations is None:
            object.__setattr__(self, "orientations", np.zeros(n_elem))
        for name, ids in self.node_sets.items():
            if ids.size and (ids.min() < 0 or ids.max() >= self.n_nodes):
                raise MeshError(f"Node set '{name}' references node ids outside the mesh")

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def n_elements(self) -> int:
        return int(self.elements.shape[0])

    @property
    def nen(self) -> int:
        return int(self.elements.shape[1])

    @property
    def quadrature(self) -> str:
        return quadrature_id(self.points_per_axis)

    @cached_property
    def geometry(self) -> ElementGeometry:
        """Shape data at the quadrature points, built on first use."""
        return ElementGeometry.from_arrays(self.nodes, self.elements, self.order, self.points_per_axis)

    def node_set(self, name: str) -> np.ndarray:
        try:
            return self.node_sets[name]
        except KeyError:
            raise MeshError(
                f"Unknown node set '{name}' (available: {sorted(self.node_sets)})"
            ) from None

    def centroids(self) -> np.ndarray:
        """Element centroids from the corner nodes, shape ``(E, 2)``."""
        return self.nodes[self.elements[:, :4]].mean(axis=1)

    def nearest_node(self, x: float, y: float) -> int:
        d2 = (self.nodes[:, 0] - x) ** 2 + (self.nodes[:, 1] - y) ** 2
        return int(np.argmin(d2))

    def edge_nodes(self, side: str) -> np.ndarray:
        """Node ids ``(m, 2 or 3)`` of the boundary edges on ``side``, corner to corner."""
        faces = self.boundary_faces.get(side)
        if faces is None:
            raise MeshError(f"Unknown boundary side '{side}' (expected one of {SIDES})")
        local = np.array(EDGE_NODES[self.order], dtype=np.int64)
        return self.elements[faces[:, 0]][np.arange(len(faces))[:, None], local[faces[:, 1]]]

    def fibre_mask(self) -> np.ndarray:
        return self.regions >= 0


@dataclass(frozen=True, eq=False)
class CrackSeam:
    """Initial straight crack: polyline end points and ``(original, copy)`` node pairs."""

    polyline: Tuple[Tuple[float, float], ...]
    pairs: np.ndarray

    @property
    def length(self) -> float:
        (x0, y0), (x1, y1) = self.polyline[0], self.polyline[-1]
        return math.hypot(x1 - x0, y1 - y0)

    @property
    def n_duplicated(self) -> int:
        return int(len(self.pairs))


def build_rect_mesh(
    domain: Domain2D,
    h_target: float,
    order: str = BILINEAR,
    length_scale: float | None = None,
    points_per_axis: int = 2,
) -> Mesh:
    """
    Structured grid of quadrilaterals covering ``domain``.

    Args:
        domain: Rectangle to mesh.
        h_target: Largest allowed element edge (mm).
        order: ``"bilinear"`` (4 nodes) or ``"serendipity-8"`` (8 nodes).
        length_scale: Phase-field length scale; when given, ``h > length_scale / 2``
            emits a ``UserWarning``.
        points_per_axis: Gauss points per direction.

    Returns:
        Mesh with boundary node sets, boundary faces and a ``center`` node.

    Raises:
        MeshError: For a non-positive target or one larger than the shorter side.
    """
    if not h_target > 0:
        raise MeshError(f"h_target must be positive (got {h_target})")
    if h_target > min(domain.width, domain.height) * (1 + 1e-12):
        raise MeshError(
            f"Degenerate mesh: h_target {h_target:.6g} mm exceeds the shorter domain side "
            f"{min(domain.width, domain.height):.6g} mm"
        )
    nen = nodes_per_element(order)

    nx = max(1, math.ceil(domain.width / h_target - 1e-9))
    ny = max(1, math.ceil(domain.height / h_target - 1e-9))
    h = max(domain.width / nx, domain.height / ny)

    if nen == 4:
        xs = np.linspace(domain.x_min, domain.x_max, nx + 1)
        ys = np.linspace(domain.y_min, domain.y_max, ny + 1)
        X, Y = np.meshgrid(xs, ys, indexing="xy")
        nodes = np.column_stack([X.ravel(), Y.ravel()])
        ex, ey = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
        ex, ey = ex.ravel(), ey.ravel()
        n0 = ey * (nx + 1) + ex
        elements = np.column_stack([n0, n0 + 1, n0 + nx + 2, n0 + nx + 1])
        grid_i = np.tile(np.arange(nx + 1), ny + 1)
        grid_j = np.repeat(np.arange(ny + 1), nx + 1)
        imax, jmax = nx, ny
    else:
        # Half-step lattice without element-centre points.
        fi, fj = np.meshgrid(np.arange(2 * nx + 1), np.arange(2 * ny + 1), indexing="xy")
        fi, fj = fi.ravel(), fj.ravel()
        keep = ~((fi % 2 == 1) & (fj % 2 == 1))
        lattice_id = np.full(fi.size, -1, dtype=np.int64)
        lattice_id[keep] = np.arange(int(keep.sum()))
        grid_i, grid_j = fi[keep], fj[keep]
        nodes = np.column_stack(
            [
                domain.x_min + grid_i * (domain.width / (2 * nx)),
                domain.y_min + grid_j * (domain.height / (2 * ny)),
            ]
        )

        def at(i, j):
            return lattice_id[j * (2 * nx + 1) + i]

        ex, ey = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
        ex, ey = ex.ravel(), ey.ravel()
        i0, j0 = 2 * ex, 2 * ey
        elements = np.column_stack(
            [
                at(i0, j0),
                at(i0 + 2, j0),
                at(i0 + 2, j0 + 2),
                at(i0, j0 + 2),
                at(i0 + 1, j0),
                at(i0 + 2, j0 + 1),
                at(i0 + 1, j0 + 2),
                at(i0, j0 + 1),
            ]
        )
        imax, jmax = 2 * nx, 2 * ny

    node_sets = {
        "left": np.flatnonzero(grid_i == 0),
        "right": np.flatnonzero(grid_i == imax),
        "bottom": np.flatnonzero(grid_j == 0),
        "top": np.flatnonzero(grid_j == jmax),
        "interface": np.zeros(0, dtype=np.int64),
    }
    cx, cy = domain.center
    d2 = (nodes[:, 0] - cx) ** 2 + (nodes[:, 1] - cy) ** 2
    node_sets["center"] = np.array([int(np.argmin(d2))])

    elem_ids = np.arange(nx * ny)
    side_masks = {
        "bottom": ey == 0,
        "right": ex == nx - 1,
        "top": ey == ny - 1,
        "left": ex == 0,
    }
    boundary_faces = {
        side: np.column_stack(
            [elem_ids[mask], np.full(int(mask.sum()), _SIDE_EDGE[side], dtype=np.int64)]
        )
        for side, mask in side_masks.items()
    }

    if length_scale is not None and h > 0.5 * length_scale * (1 + 1e-9):
        warnings.warn(
            f"Element size h={h:.4g} mm exceeds half the length scale "
            f"({0.5 * length_scale:.4g} mm); the crack band will be under-resolved",
            UserWarning,
            stacklevel=2,
        )

    logger.debug("Built %s mesh %dx%d (%d nodes, h=%.4g mm)", order, nx, ny, len(nodes), h)
    return Mesh(
        domain=domain,
        nodes=nodes,
        elements=elements.astype(np.int64),
        order=order,
        h=float(h),
        points_per_axis=points_per_axis,
        node_sets=node_sets,
        boundary_faces=boundary_faces,
    )


def _edge_table(mesh: Mesh) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Every element edge as sorted corner pairs, with its element and local edge index."""
    local = EDGE_NODES[mesh.order]
    n_edges = len(local)
    corners = np.array([[e[0], e[-1]] for e in local], dtype=np.int64)
    pairs = mesh.elements[:, corners]  # (E, 4, 2)
    keys = np.sort(pairs.reshape(-1, 2), axis=1)
    owner = np.repeat(np.arange(mesh.n_elements), n_edges)
    local_edge = np.tile(np.arange(n_edges), mesh.n_elements)
    return keys, owner, local_edge


def interface_nodes(mesh: Mesh, regions: np.ndarray) -> np.ndarray:
    """Nodes of element edges shared by two elements with different region tags."""
    keys, owner, local_edge = _edge_table(mesh)
    _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    tag = regions[owner]
    n_unique = counts.size
    tag_min = np.full(n_unique, np.iinfo(np.int64).max)
    tag_max = np.full(n_unique, np.iinfo(np.int64).min)
    np.minimum.at(tag_min, inverse, tag)
    np.maximum.at(tag_max, inverse, tag)
    is_seam = (counts == 2) & (tag_min != tag_max)

    rows = is_seam[inverse]
    if not np.any(rows):
        return np.zeros(0, dtype=np.int64)
    local = np.array(EDGE_NODES[mesh.order], dtype=np.int64)
    edge_nodes = mesh.elements[owner[rows][:, None], local[local_edge[rows]]]
    return np.unique(edge_nodes.ravel())


def classify_regions(mesh: Mesh, layout: FibreLayout) -> Mesh:
    """
    Tag each element as matrix or fibre by a centroid test and build the interface set.

    Circles take precedence over strips; both follow the layout's region numbering.
    Calling it again with the same layout gives the same tags.
    """
    centroids = mesh.centroids()
    x, y = centroids[:, 0], centroids[:, 1]
    regions = np.full(mesh.n_elements, MATRIX_REGION, dtype=np.int64)
    orientations = np.zeros(mesh.n_elements)

    shapes = list(layout.circles) + list(layout.strips)
    for k in range(len(shapes) - 1, -1, -1):
        inside = shapes[k].contains(x, y)
        regions[inside] = k
        orientations[inside] = layout.fibre_orientation(k)

    node_sets = dict(mesh.node_sets)
    node_sets["interface"] = interface_nodes(mesh, regions)
    logger.debug(
        "Classified %d fibre elements of %d; %d interface nodes",
        int((regions >= 0).sum()),
        mesh.n_elements,
        len(node_sets["interface"]),
    )
    new = replace(mesh, regions=regions, orientations=orientations, node_sets=node_sets, layout=layout)
    return new


def insert_edge_crack(mesh: Mesh, a0: float, y_pos: float, x0: float | None = None) -> Tuple[Mesh, CrackSeam]:
    """
    Open a straight horizontal crack from the left edge by duplicating seam nodes.

    Nodes on ``y = y_pos`` with ``x0 <= x < x0 + a0`` are duplicated (the crack tip
    node stays shared). Elements whose centroid lies above the seam take the
    copies, so the two crack faces carry no traction.

    Raises:
        MeshError: When ``a0`` is negative or not shorter than the domain width.
        CrackAlignmentError: When the seam or its tip is not on mesh lines.
    """
    x0 = mesh.domain.x_min if x0 is None else float(x0)
    if a0 < 0 or a0 >= mesh.domain.width:
        raise MeshError(f"Crack length must satisfy 0 <= a0 < W (got a0={a0}, W={mesh.domain.width})")
    if a0 == 0:
        return mesh, CrackSeam(polyline=((x0, y_pos), (x0, y_pos)), pairs=np.zeros((0, 2), dtype=np.int64))

    tol = _GEOM_TOL * mesh.h
    on_line = np.abs(mesh.nodes[:, 1] - y_pos) < tol
    if not np.any(on_line):
        raise CrackAlignmentError(f"Crack line y={y_pos} does not follow a row of mesh nodes")
    x_tip = x0 + a0
    xs = mesh.nodes[on_line, 0]
    if not np.any(np.abs(xs - x0) < tol) or not np.any(np.abs(xs - x_tip) < tol):
        raise CrackAlignmentError(
            f"Crack from x={x0} to x={x_tip} at y={y_pos} does not start and end on mesh nodes"
        )

    seam = np.flatnonzero(on_line & (mesh.nodes[:, 0] >= x0 - tol) & (mesh.nodes[:, 0] < x_tip - tol))
    seam = seam[np.argsort(mesh.nodes[seam, 0])]
    copies = mesh.n_nodes + np.arange(len(seam))

    remap = np.arange(mesh.n_nodes + len(seam))
    remap[seam] = copies
    above = mesh.centroids()[:, 1] > y_pos
    elements = mesh.elements.copy()
    elements[above] = remap[elements[above]]

    nodes = np.vstack([mesh.nodes, mesh.nodes[seam]])
    node_sets = {}
    for name, ids in mesh.node_sets.items():
        extra = copies[np.isin(seam, ids)]
        node_sets[name] = np.concatenate([ids, extra]) if extra.size else ids
    node_sets["crack_lower"] = seam
    node_sets["crack_upper"] = copies

    logger.debug("Inserted edge crack a0=%.4g mm at y=%.4g mm (%d duplicated nodes)", a0, y_pos, len(seam))
    cracked = replace(mesh, nodes=nodes, elements=elements, node_sets=node_sets)
    return cracked, CrackSeam(
        polyline=((x0, float(y_pos)), (x_tip, float(y_pos))),
        pairs=np.column_stack([seam, copies]),
    )


def dump_mesh_text(mesh: Mesh, path: str | Path) -> Path:
    """Write plain node and element tables for debugging."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"# nodes {mesh.n_nodes}\n# id x y\n")
        for i, (x, y) in enumerate(mesh.nodes):
            fh.write(f"{i} {x:.12g} {y:.12g}\n")
        fh.write(f"# elements {mesh.n_elements} order={mesh.order}\n# id region orientation nodes...\n")
        for e, conn in enumerate(mesh.elements):
            ids = " ".join(str(int(n)) for n in conn)
            fh.write(f"{e} {int(mesh.regions[e])} {mesh.orientations[e]:g} {ids}\n")
    return path


__all__ = [
    "MATRIX_REGION",
    "SIDES",
    "SERENDIPITY",
    "CrackAlignmentError",
    "CrackSeam",
    "Mesh",
    "build_rect_mesh",
    "classify_regions",
    "dump_mesh_text",
    "insert_edge_crack",
    "interface_nodes",
]
