"""
Isoparametric quadrilateral elements.

Shape functions for the 4-node bilinear and 8-node serendipity quads, tensor
Gauss-Legendre rules, and :class:`ElementGeometry`, which evaluates shape
functions, physical gradients and integration weights for every element of
a mesh at once so the solvers can assemble with plain array arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .domain import MeshError

BILINEAR = "bilinear"
SERENDIPITY = "serendipity-8"
ELEMENT_ORDERS = (BILINEAR, SERENDIPITY)

# Local node positions in the reference square [-1, 1]^2.
# Corners counter-clockwise, then the mid-side nodes of edges 0-1, 1-2, 2-3, 3-0.
_Q4_NODES = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
_Q8_NODES = np.array(
    [
        [-1.0, -1.0],
        [1.0, -1.0],
        [1.0, 1.0],
        [-1.0, 1.0],
        [0.0, -1.0],
        [1.0, 0.0],
        [0.0, 1.0],
        [-1.0, 0.0],
    ]
)

# Local node lists of each element edge, ordered from one corner to the next.
EDGE_NODES = {
    BILINEAR: ((0, 1), (1, 2), (2, 3), (3, 0)),
    SERENDIPITY: ((0, 4, 1), (1, 5, 2), (2, 6, 3), (3, 7, 0)),
}

# VTK cell type ids.
VTK_CELL_TYPES = {BILINEAR: 9, SERENDIPITY: 23}


def nodes_per_element(order: str) -> int:
    if order == BILINEAR:
        return 4
    if order == SERENDIPITY:
        return 8
    raise MeshError(f"Unknown element order '{order}' (expected one of {ELEMENT_ORDERS})")


def reference_nodes(order: str) -> np.ndarray:
    return _Q4_NODES if nodes_per_element(order) == 4 else _Q8_NODES


def shape_functions(order: str, xi: np.ndarray, eta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Evaluate shape functions and their reference derivatives.

    Args:
        order: ``"bilinear"`` or ``"serendipity-8"``.
        xi, eta: Arrays of reference coordinates with identical shape ``(p,)``.

    Returns:
        ``N`` of shape ``(p, nen)`` and ``dN`` of shape ``(p, nen, 2)`` holding
        derivatives with respect to ``(xi, eta)``.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    ref = reference_nodes(order)
    nen = len(ref)
    N = np.zeros((xi.size, nen))
    dN = np.zeros((xi.size, nen, 2))

    for a, (xa, ya) in enumerate(ref):
        if nen == 4:
            N[:, a] = 0.25 * (1 + xi * xa) * (1 + eta * ya)
            dN[:, a, 0] = 0.25 * xa * (1 + eta * ya)
            dN[:, a, 1] = 0.25 * ya * (1 + xi * xa)
        elif xa != 0 and ya != 0:
            N[:, a] = 0.25 * (1 + xi * xa) * (1 + eta * ya) * (xi * xa + eta * ya - 1)
            dN[:, a, 0] = 0.25 * xa * (1 + eta * ya) * (2 * xi * xa + eta * ya)
            dN[:, a, 1] = 0.25 * ya * (1 + xi * xa) * (xi * xa + 2 * eta * ya)
        elif xa == 0:
            N[:, a] = 0.5 * (1 - xi**2) * (1 + eta * ya)
            dN[:, a, 0] = -xi * (1 + eta * ya)
            dN[:, a, 1] = 0.5 * ya * (1 - xi**2)
        else:
            N[:, a] = 0.5 * (1 + xi * xa) * (1 - eta**2)
            dN[:, a, 0] = 0.5 * xa * (1 - eta**2)
            dN[:, a, 1] = -eta * (1 + xi * xa)
    return N, dN


def gauss_rule(points_per_axis: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre rule on the reference square: points ``(q, 2)``, weights ``(q,)``."""
    if points_per_axis < 1:
        raise MeshError(f"Quadrature needs at least one point per axis (got {points_per_axis})")
    x, w = np.polynomial.legendre.leggauss(points_per_axis)
    xi, eta = np.meshgrid(x, x, indexing="xy")
    wx, wy = np.meshgrid(w, w, indexing="xy")
    points = np.column_stack([xi.ravel(), eta.ravel()])
    return points, (wx * wy).ravel()


def quadrature_id(points_per_axis: int) -> str:
    return f"gauss{points_per_axis}x{points_per_axis}"


def edge_shape_functions(n_edge_nodes: int, s: np.ndarray) -> np.ndarray:
    """1D Lagrange shape functions along an edge (2 or 3 nodes, middle node last-but-one)."""
    s = np.atleast_1d(s)
    if n_edge_nodes == 2:
        return np.column_stack([0.5 * (1 - s), 0.5 * (1 + s)])
    if n_edge_nodes == 3:
        return np.column_stack([0.5 * s * (s - 1), 1 - s**2, 0.5 * s * (s + 1)])
    raise MeshError(f"Unsupported edge with {n_edge_nodes} nodes")


@dataclass(frozen=True, eq=False)
class ElementGeometry:
    """
    Shape data of every element at every quadrature point.

    Attributes:
        N: ``(q, nen)`` shape function values (identical for all elements).
        dNdx: ``(E, q, nen, 2)`` physical gradients.
        wdet: ``(E, q)`` quadrature weight times Jacobian determinant.
        qp_coords: ``(E, q, 2)`` physical coordinates of the quadrature points.
    """

    N: np.ndarray
    dNdx: np.ndarray
    wdet: np.ndarray
    qp_coords: np.ndarray
    connectivity: np.ndarray
    n_nodes: int

    @classmethod
    def from_arrays(
        cls,
        nodes: np.ndarray,
        connectivity: np.ndarray,
        order: str,
        points_per_axis: int = 2,
    ) -> "ElementGeometry":
        points, weights = gauss_rule(points_per_axis)
        N, dN = shape_functions(order, points[:, 0], points[:, 1])
        X = nodes[connectivity]  # (E, nen, 2)
        # J[e, q, i, j] = d x_j / d xi_i
        J = np.einsum("qai,eaj->eqij", dN, X)
        det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
        if np.any(det <= 0):
            bad = int(np.argwhere(det <= 0)[0, 0])
            raise MeshError(f"Non-positive Jacobian determinant in element {bad}")
        inv = np.empty_like(J)
        inv[..., 0, 0] = J[..., 1, 1] / det
        inv[..., 1, 1] = J[..., 0, 0] / det
        inv[..., 0, 1] = -J[..., 0, 1] / det
        inv[..., 1, 0] = -J[..., 1, 0] / det
        # dN/dx_j = sum_i dN/dxi_i * dxi_i/dx_j ; dxi/dx = inv(J) transposed layout
        dNdx = np.einsum("qai,eqji->eqaj", dN, inv)
        wdet = det * weights[None, :]
        qp_coords = np.einsum("qa,eaj->eqj", N, X)
        return cls(
            N=N,
            dNdx=dNdx,
            wdet=wdet,
            qp_coords=qp_coords,
            connectivity=np.asarray(connectivity),
            n_nodes=int(nodes.shape[0]),
        )

    @property
    def n_elements(self) -> int:
        return int(self.wdet.shape[0])

    @property
    def n_qp(self) -> int:
        return int(self.wdet.shape[1])

    @property
    def nen(self) -> int:
        return int(self.N.shape[1])

    def interpolate(self, nodal: np.ndarray) -> np.ndarray:
        """Scalar nodal field -> ``(E, q)`` values at the quadrature points."""
        return np.einsum("qa,ea->eq", self.N, np.asarray(nodal)[self.connectivity])

    def gradient(self, nodal: np.ndarray) -> np.ndarray:
        """Scalar nodal field -> ``(E, q, 2)`` gradients at the quadrature points."""
        return np.einsum("eqaj,ea->eqj", self.dNdx, np.asarray(nodal)[self.connectivity])

    def integrate(self, qp_values: np.ndarray) -> float:
        return float(np.sum(qp_values * self.wdet))

    def mass_matrices(self, coef: np.ndarray | float = 1.0) -> np.ndarray:
        """Element matrices ``sum_q coef w N_a N_b`` of shape ``(E, nen, nen)``."""
        c = np.broadcast_to(np.asarray(coef, dtype=float), self.wdet.shape) * self.wdet
        return np.einsum("eq,qa,qb->eab", c, self.N, self.N)

    def laplace_matrices(self, coef: np.ndarray | float = 1.0) -> np.ndarray:
        """Element matrices ``sum_q coef w grad N_a . grad N_b``."""
        c = np.broadcast_to(np.asarray(coef, dtype=float), self.wdet.shape) * self.wdet
        return np.einsum("eq,eqaj,eqbj->eab", c, self.dNdx, self.dNdx)

    def load_vectors(self, coef: np.ndarray) -> np.ndarray:
        """Element vectors ``sum_q coef w N_a`` of shape ``(E, nen)``."""
        return np.einsum("eq,qa->ea", np.asarray(coef) * self.wdet, self.N)

    def strain_matrices(self) -> np.ndarray:
        """
        Plane strain-displacement matrices ``B`` of shape ``(E, q, 3, 2 nen)``.

        Element DOFs are interleaved ``(u_x, u_y)`` per local node and strains are
        in Voigt order ``(eps_xx, eps_yy, gamma_xy)``.
        """
        E, q, nen, _ = self.dNdx.shape
        B = np.zeros((E, q, 3, 2 * nen))
        B[:, :, 0, 0::2] = self.dNdx[..., 0]
        B[:, :, 1, 1::2] = self.dNdx[..., 1]
        B[:, :, 2, 0::2] = self.dNdx[..., 1]
        B[:, :, 2, 1::2] = self.dNdx[..., 0]
        return B

    def vector_dofs(self) -> np.ndarray:
        """Global DOF ids ``(E, 2 nen)`` for a two-component nodal field."""
        dofs = np.empty((self.n_elements, 2 * self.nen), dtype=np.int64)
        dofs[:, 0::2] = 2 * self.connectivity
        dofs[:, 1::2] = 2 * self.connectivity + 1
        return dofs
