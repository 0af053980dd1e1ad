"""
Sparse symmetric systems shared by the diffusion, displacement, damage and
indicator sub-problems: assembly from element arrays, Dirichlet constraints
and debugging dumps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12


class ConstraintError(ValueError):
    """Raised when one DOF receives two different prescribed values."""


@dataclass(frozen=True, eq=False)
class Constraints:
    """Prescribed DOF values, sorted by DOF id and free of duplicates."""

    dofs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self) -> int:
        return int(self.dofs.size)

    @classmethod
    def merge(cls, *entries: tuple[np.ndarray, np.ndarray | float], atol: float = 1e-14) -> "Constraints":
        """
        Combine ``(dofs, values)`` entries into one constraint list.

        A DOF listed several times must carry the same value each time.

        Raises:
            ConstraintError: When a DOF receives conflicting values.
        """
        if not entries:
            return cls()
        all_dofs, all_vals = [], []
        for dofs, values in entries:
            dofs = np.asarray(dofs, dtype=np.int64).ravel()
            all_dofs.append(dofs)
            all_vals.append(np.broadcast_to(np.asarray(values, dtype=float), dofs.shape).ravel())
        dofs = np.concatenate(all_dofs)
        vals = np.concatenate(all_vals)
        if dofs.size == 0:
            return cls()

        order = np.argsort(dofs, kind="stable")
        dofs, vals = dofs[order], vals[order]
        unique, start = np.unique(dofs, return_index=True)
        first = vals[start]
        spread = np.abs(vals - np.repeat(first, np.diff(np.append(start, dofs.size))))
        scale = max(1.0, float(np.max(np.abs(vals))))
        if np.any(spread > atol * scale):
            bad = int(dofs[np.argmax(spread)])
            raise ConstraintError(f"Conflicting prescribed values on DOF {bad}")
        return cls(dofs=unique, values=first.copy())

    def full_vector(self, n: int) -> np.ndarray:
        g = np.zeros(n)
        g[self.dofs] = self.values
        return g


@dataclass(frozen=True, eq=False)
class SparseLinearSystem:
    """Symmetric CSR matrix, right-hand side and the constraints applied to them."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    constraints: Constraints = field(default_factory=Constraints)
    label: str = ""

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x - self.rhs

    def relative_residual(self, x: np.ndarray) -> float:
        bnorm = float(np.linalg.norm(self.rhs))
        rnorm = float(np.linalg.norm(self.residual(x)))
        return rnorm / bnorm if bnorm > 0 else rnorm


def assemble_matrix(dofs: np.ndarray, element_matrices: np.ndarray, n: int) -> sp.csr_matrix:
    """
    Sum element matrices ``(E, k, k)`` into a global ``n x n`` CSR matrix.

    Duplicate entries are summed in a fixed order, so repeated assembly of the
    same arrays is bitwise reproducible.
    """
    dofs = np.asarray(dofs, dtype=np.int64)
    k = dofs.shape[1]
    rows = np.repeat(dofs, k, axis=1).ravel()
    cols = np.tile(dofs, (1, k)).ravel()
    matrix = sp.coo_matrix((element_matrices.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    matrix.sum_duplicates()
    return matrix


def assemble_vector(dofs: np.ndarray, element_vectors: np.ndarray, n: int) -> np.ndarray:
    """Sum element vectors ``(E, k)`` into a global vector of length ``n``."""
    return np.bincount(np.asarray(dofs).ravel(), weights=element_vectors.ravel(), minlength=n)


def is_symmetric(matrix: sp.spmatrix, tol: float = SYMMETRY_TOL) -> bool:
    diff = abs(matrix - matrix.T)
    scale = abs(matrix).max() if matrix.nnz else 0.0
    return diff.nnz == 0 or diff.max() <= tol * max(scale, 1e-300)


def apply_dirichlet(system: SparseLinearSystem, constraints: Constraints) -> SparseLinearSystem:
    """
    Symmetric elimination of prescribed DOFs.

    Constrained rows and columns are zeroed with a unit diagonal; the right-hand
    side of the free DOFs is corrected by ``-A[:, c] g`` and the constrained
    entries hold ``g``, so any solver returns the prescribed values exactly.

    Raises:
        ConstraintError: When a constrained DOF id is outside the system.
    """
    n = system.size
    merged = Constraints.merge(
        (system.constraints.dofs, system.constraints.values),
        (constraints.dofs, constraints.values),
    )
    if len(merged) == 0:
        return system
    if merged.dofs.min() < 0 or merged.dofs.max() >= n:
        raise ConstraintError(f"Constrained DOF outside system of size {n}")

    free = np.ones(n)
    free[merged.dofs] = 0.0
    g = merged.full_vector(n)
    keep = sp.diags(free)
    matrix = (keep @ system.matrix @ keep + sp.diags(1.0 - free)).tocsr()
    matrix.eliminate_zeros()
    rhs = free * (system.rhs - system.matrix @ g) + g
    return SparseLinearSystem(matrix=matrix, rhs=rhs, constraints=merged, label=system.label)


def dump_matrix_coo(matrix: sp.spmatrix, path: str | Path) -> Path:
    """Write ``row col value`` lines (zero-based) for debugging."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    coo = matrix.tocoo()
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"# {coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{int(r)} {int(c)} {v:.17g}\n")
    logger.debug("Wrote %d matrix entries to %s", coo.nnz, path)
    return path
