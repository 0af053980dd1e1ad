"""
Linear solver backends.

Every sub-problem in the simulator reduces to a symmetric positive-definite
system after constraint elimination. Two backends share one interface: a
sparse direct factorization for moderate sizes and Jacobi-preconditioned
conjugate gradients for large ones. :func:`select_solver` picks between them.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .system import SparseLinearSystem

logger = logging.getLogger(__name__)

DIRECT_TOL = 1e-10
ITERATIVE_TOL = 1e-8
# Systems with at least this many DOFs go to the iterative backend.
DIRECT_DOF_LIMIT = 200_000
REFINEMENT_STEPS = 3

SOLVER_CHOICES = ("auto", "direct", "cg")


class SolverError(RuntimeError):
    """Raised on breakdown, a non-positive pivot or iterative non-convergence."""


Factorization = Callable[[np.ndarray], np.ndarray]


class LinearSolver(ABC):
    """Common interface of the linear solver backends."""

    name: str = "base"
    tolerance: float = DIRECT_TOL

    @abstractmethod
    def factorize(self, matrix: sp.csr_matrix) -> Factorization:
        """
        Prepare ``matrix`` for repeated solves.

        Returns:
            A callable mapping a right-hand side to the solution.

        Raises:
            SolverError: When the matrix is not positive definite.
        """

    def solve(self, system: SparseLinearSystem) -> np.ndarray:
        """Solve ``system`` and check the relative residual contract."""
        if not np.any(system.rhs):
            return np.zeros(system.size)
        x = self.factorize(system.matrix)(system.rhs)
        self.check_residual(system, x)
        return x

    def check_residual(self, system: SparseLinearSystem, x: np.ndarray) -> float:
        rel = system.relative_residual(x)
        logger.debug(
            "%s solve %s: n=%d, relative residual %.3e", self.name, system.label, system.size, rel
        )
        if not np.isfinite(rel):
            raise SolverError(f"{self.name} solve of {system.label or 'system'} produced non-finite values")
        if rel > self.tolerance:
            raise SolverError(
                f"{self.name} solve of {system.label or 'system'} misses the residual contract: "
                f"{rel:.3e} > {self.tolerance:.1e}"
            )
        return rel


class DirectSolver(LinearSolver):
    """SuperLU in symmetric mode with diagonal pivoting; pivots must be positive."""

    name = "direct"
    tolerance = DIRECT_TOL

    def factorize(self, matrix: sp.csr_matrix) -> Factorization:
        try:
            lu = spla.splu(
                sp.csc_matrix(matrix),
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:
            raise SolverError(f"Direct factorization failed: {exc}") from exc

        pivots = lu.U.diagonal()
        bad = np.flatnonzero(~(pivots > 0))
        if bad.size:
            column = int(np.argsort(lu.perm_c)[bad[0]])
            raise SolverError(
                f"Matrix is not positive definite: pivot {pivots[bad[0]]:.3e} at DOF {column}"
            )

        def solve(b: np.ndarray) -> np.ndarray:
            b = np.asarray(b, dtype=float)
            x = lu.solve(b)
            bnorm = float(np.linalg.norm(b)) or 1.0
            for _ in range(REFINEMENT_STEPS):
                r = b - matrix @ x
                if np.linalg.norm(r) <= 0.1 * DIRECT_TOL * bnorm:
                    break
                x = x + lu.solve(r)
            return x

        return solve


class ConjugateGradientSolver(LinearSolver):
    """Conjugate gradients with a Jacobi (diagonal) preconditioner."""

    name = "cg"
    tolerance = ITERATIVE_TOL

    def __init__(self, rtol: float = ITERATIVE_TOL * 0.1, maxiter: int | None = None):
        self.rtol = rtol
        self.maxiter = maxiter

    def factorize(self, matrix: sp.csr_matrix) -> Factorization:
        diag = matrix.diagonal()
        bad = np.flatnonzero(~(diag > 0))
        if bad.size:
            raise SolverError(
                f"Matrix is not positive definite: diagonal {diag[bad[0]]:.3e} at DOF {int(bad[0])}"
            )
        inv_diag = 1.0 / diag
        n = matrix.shape[0]
        preconditioner = spla.LinearOperator((n, n), matvec=lambda v: inv_diag * v, dtype=float)
        maxiter = self.maxiter or 10 * n

        def solve(b: np.ndarray) -> np.ndarray:
            iterations = 0

            def count(_):
                nonlocal iterations
                iterations += 1

            x, info = spla.cg(
                matrix, b, rtol=self.rtol, maxiter=maxiter, M=preconditioner, callback=count
            )
            if info > 0:
                raise SolverError(f"CG did not converge after {iterations} iterations")
            if info < 0:
                raise SolverError(f"CG breakdown at iteration {iterations}")
            logger.debug("CG converged in %d iterations (n=%d)", iterations, n)
            return x

        return solve


def select_solver(n_dofs: int, choice: str = "auto", dof_limit: int = DIRECT_DOF_LIMIT) -> LinearSolver:
    """
    Pick a backend: ``"direct"``, ``"cg"``, or ``"auto"`` (direct below ``dof_limit``).

    Raises:
        ValueError: For an unknown choice.
    """
    if choice not in SOLVER_CHOICES:
        raise ValueError(f"Unknown solver '{choice}' (expected one of {SOLVER_CHOICES})")
    if choice == "direct" or (choice == "auto" and n_dofs < dof_limit):
        return DirectSolver()
    return ConjugateGradientSolver()


def solve(system: SparseLinearSystem, solver: LinearSolver | None = None) -> np.ndarray:
    """Solve a constrained system with ``solver`` or the automatic choice."""
    solver = solver or select_solver(system.size)
    return solver.solve(system)
