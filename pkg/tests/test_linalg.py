"""
Sparse assembly, Dirichlet elimination and the linear solver backends.
"""

import numpy as np
import pytest
import scipy.sparse as sp

from src.linalg import (
    ConjugateGradientSolver,
    ConstraintError,
    Constraints,
    DirectSolver,
    SolverError,
    SparseLinearSystem,
    apply_dirichlet,
    assemble_matrix,
    assemble_vector,
    dump_matrix_coo,
    is_symmetric,
    select_solver,
    solve,
)


def random_spd(n, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    return a @ a.T + n * np.eye(n)


def dense_elimination(A, b, dofs, values):
    """Reference: solve for the free DOFs with the constrained ones moved to the right."""
    n = len(b)
    free = np.setdiff1d(np.arange(n), dofs)
    x = np.zeros(n)
    x[dofs] = values
    rhs = b[free] - A[np.ix_(free, dofs)] @ values
    x[free] = np.linalg.solve(A[np.ix_(free, free)], rhs)
    return x


@pytest.fixture(params=[DirectSolver, ConjugateGradientSolver])
def backend(request):
    return request.param()


class TestAssembly:
    def test_duplicates_are_summed(self):
        dofs = np.array([[0, 1], [1, 2]])
        ke = np.array([[[1.0, -1.0], [-1.0, 1.0]]] * 2)
        K = assemble_matrix(dofs, ke, 3).toarray()
        assert np.allclose(K, [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])

    def test_vector_assembly(self):
        f = assemble_vector(np.array([[0, 1], [1, 2]]), np.array([[1.0, 2.0], [3.0, 4.0]]), 3)
        assert np.allclose(f, [1.0, 5.0, 4.0])

    def test_repeated_assembly_is_bitwise_identical(self):
        rng = np.random.default_rng(1)
        dofs = rng.integers(0, 30, size=(40, 4))
        ke = rng.normal(size=(40, 4, 4))
        first = assemble_matrix(dofs, ke, 30)
        second = assemble_matrix(dofs, ke, 30)
        assert first.data.tobytes() == second.data.tobytes()

    def test_symmetry_check(self):
        assert is_symmetric(sp.csr_matrix(random_spd(5)))
        assert not is_symmetric(sp.csr_matrix(np.array([[1.0, 2.0], [0.0, 1.0]])))


class TestConstraints:
    def test_merge_sorts_and_deduplicates(self):
        c = Constraints.merge((np.array([4, 1]), 0.0), (np.array([1, 2]), np.array([0.0, 3.0])))
        assert list(c.dofs) == [1, 2, 4]
        assert list(c.values) == [0.0, 3.0, 0.0]

    def test_conflicting_values(self):
        with pytest.raises(ConstraintError, match="DOF 1"):
            Constraints.merge((np.array([1]), 0.0), (np.array([1]), 0.5))

    def test_empty_merge(self):
        assert len(Constraints.merge()) == 0


class TestApplyDirichlet:
    def test_all_constrained_to_zero(self, backend):
        A = sp.csr_matrix(random_spd(6))
        system = SparseLinearSystem(A, np.ones(6))
        constrained = apply_dirichlet(system, Constraints.merge((np.arange(6), 0.0)))
        assert np.allclose(backend.solve(constrained), 0.0)

    def test_two_by_two_reduces_to_scalar_equation(self):
        A = sp.csr_matrix(np.array([[4.0, 1.0], [1.0, 3.0]]))
        system = apply_dirichlet(SparseLinearSystem(A, np.array([1.0, 2.0])), Constraints.merge(([0], 0.5)))
        x = DirectSolver().solve(system)
        assert x[0] == pytest.approx(0.5)
        assert x[1] == pytest.approx((2.0 - 1.0 * 0.5) / 3.0)

    def test_random_spd_matches_dense_oracle(self, backend):
        A = random_spd(50, seed=7)
        rng = np.random.default_rng(7)
        b = rng.normal(size=50)
        dofs = np.sort(rng.choice(50, size=10, replace=False))
        values = rng.normal(size=10)
        system = apply_dirichlet(SparseLinearSystem(sp.csr_matrix(A), b), Constraints.merge((dofs, values)))
        expected = dense_elimination(A, b, dofs, values)
        assert np.allclose(backend.solve(system), expected, rtol=1e-8, atol=1e-10)

    def test_elimination_keeps_symmetry(self):
        system = SparseLinearSystem(sp.csr_matrix(random_spd(8)), np.ones(8))
        constrained = apply_dirichlet(system, Constraints.merge(([0, 5], [1.0, -1.0])))
        assert is_symmetric(constrained.matrix)

    def test_out_of_range_dof(self):
        system = SparseLinearSystem(sp.csr_matrix(np.eye(3)), np.ones(3))
        with pytest.raises(ConstraintError):
            apply_dirichlet(system, Constraints.merge(([5], 0.0)))


class TestSolvers:
    def test_identity(self, backend):
        b = np.arange(1.0, 6.0)
        assert np.allclose(backend.solve(SparseLinearSystem(sp.identity(5, format="csr"), b)), b)

    def test_laplacian_point_load(self, backend):
        # -u'' = delta at the middle node, u = 0 at both ends: a tent of height n/4 (unit spacing)
        n = 21
        K = sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr")
        f = np.zeros(n)
        f[n // 2] = 1.0
        system = apply_dirichlet(SparseLinearSystem(K, f), Constraints.merge(([0, n - 1], 0.0)))
        x = backend.solve(system)
        m = n // 2
        expected = np.minimum(np.arange(n), (n - 1) - np.arange(n)) / 2.0
        assert x[m] == pytest.approx(m / 2.0)
        assert np.allclose(x, expected)

    def test_zero_rhs_short_circuits(self, backend):
        x = backend.solve(SparseLinearSystem(sp.csr_matrix(random_spd(4)), np.zeros(4)))
        assert np.array_equal(x, np.zeros(4))

    def test_indefinite_matrix_rejected(self):
        A = sp.csr_matrix(np.diag([1.0, -2.0, 3.0]))
        with pytest.raises(SolverError, match="positive definite"):
            DirectSolver().solve(SparseLinearSystem(A, np.ones(3)))
        with pytest.raises(SolverError, match="positive definite"):
            ConjugateGradientSolver().solve(SparseLinearSystem(A, np.ones(3)))

    def test_cg_reports_non_convergence(self):
        A = sp.csr_matrix(random_spd(30, seed=2))
        with pytest.raises(SolverError, match="did not converge"):
            ConjugateGradientSolver(maxiter=1).solve(SparseLinearSystem(A, np.ones(30)))

    def test_residual_contract_is_enforced(self):
        n = 200
        A = sp.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr")
        system = SparseLinearSystem(A, np.ones(n), label="chain")
        with pytest.raises(SolverError, match="chain misses the residual contract"):
            ConjugateGradientSolver(rtol=1e-2).solve(system)

    def test_select_solver(self):
        assert isinstance(select_solver(100), DirectSolver)
        assert isinstance(select_solver(100, "cg"), ConjugateGradientSolver)
        assert isinstance(select_solver(10**6), ConjugateGradientSolver)
        with pytest.raises(ValueError):
            select_solver(10, "gmres")

    def test_module_level_solve(self):
        A = random_spd(5, seed=4)
        b = np.ones(5)
        assert np.allclose(solve(SparseLinearSystem(sp.csr_matrix(A), b)), np.linalg.solve(A, b))


def test_dump_matrix_coo(tmp_path):
    path = dump_matrix_coo(sp.csr_matrix(np.array([[2.0, 0.0], [0.0, 3.0]])), tmp_path / "k.txt")
    lines = path.read_text().splitlines()
    assert lines[0] == "# 2 2 2"
    assert lines[1:] == ["0 0 2", "1 1 3"]
