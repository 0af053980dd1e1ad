"""Sparse symmetric systems, Dirichlet elimination and linear solvers."""

from .solvers import (
    ConjugateGradientSolver,
    DirectSolver,
    LinearSolver,
    SolverError,
    select_solver,
    solve,
)
from .system import (
    ConstraintError,
    Constraints,
    SparseLinearSystem,
    apply_dirichlet,
    assemble_matrix,
    assemble_vector,
    dump_matrix_coo,
    is_symmetric,
)

__all__ = [
    "ConjugateGradientSolver",
    "ConstraintError",
    "Constraints",
    "DirectSolver",
    "LinearSolver",
    "SolverError",
    "SparseLinearSystem",
    "apply_dirichlet",
    "assemble_matrix",
    "assemble_vector",
    "dump_matrix_coo",
    "is_symmetric",
    "select_solver",
    "solve",
]
