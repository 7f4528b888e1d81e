import numpy as np
import pytest

import trivirus as tv
from trivirus.errors import (
    NegativeEntry,
    NotIrreducible,
    NotMetzler,
    NotSymmetric,
)
from trivirus.scenarios import builtin_example

from helpers import CYCLE4, char_poly_radius, random_irreducible


class TestIsIrreducible:
    def test_weighted_cycle(self):
        assert tv.is_irreducible(1.5 * CYCLE4)

    def test_identity_reducible(self):
        assert not tv.is_irreducible(np.eye(3))

    def test_block_diagonal_of_irreducible_blocks(self):
        B = np.zeros((4, 4))
        B[0, 1] = B[1, 0] = 1.0
        B[2, 3] = B[3, 2] = 1.0
        assert not tv.is_irreducible(B)

    def test_negative_entry_rejected(self):
        with pytest.raises(NegativeEntry):
            tv.is_irreducible([[0, -1], [1, 0]])


class TestPerron:
    def test_scaled_cycle(self):
        triple = tv.perron(1.5 * CYCLE4)
        assert abs(triple.rho - 1.5) < 1e-10
        assert np.allclose(triple.right, 0.25, atol=1e-10)
        assert np.allclose(triple.left, 1.0, atol=1e-9)  # left.right = 1

    def test_symmetric_pair(self):
        triple = tv.perron([[0, 2.0], [2.0, 0]])
        assert abs(triple.rho - 2.0) < 1e-10
        assert np.allclose(triple.right, 0.5, atol=1e-10)

    def test_line_generator_has_radius_one(self):
        # C = (I - Z) B2 of the built-in line presets is a plain permutation
        system = builtin_example(3).system
        z = np.full(4, 1.0 / 3.0)
        C = (1.0 - z)[:, None] * system.B[1]
        triple = tv.perron(C)
        assert abs(triple.rho - 1.0) < 1e-10
        direction = triple.right / np.max(triple.right)
        assert np.allclose(direction, z / np.max(z), atol=1e-9)

    def test_reducible_rejected(self):
        with pytest.raises(NotIrreducible):
            tv.perron(np.eye(3))

    def test_residuals_and_positivity(self):
        rng = np.random.Generator(np.random.PCG64(17))
        for _ in range(25):
            n = int(rng.integers(2, 7))
            A = random_irreducible(rng, n)
            triple = tv.perron(A)
            assert np.all(triple.right > 0) and np.all(triple.left > 0)
            assert np.abs(A @ triple.right - triple.rho * triple.right).sum() < 1e-10
            assert np.abs(triple.left @ A - triple.rho * triple.left).sum() < 1e-9
            assert abs(triple.left @ triple.right - 1.0) < 1e-12

    def test_shift_identity(self):
        rng = np.random.Generator(np.random.PCG64(3))
        for _ in range(10):
            A = random_irreducible(rng, 4)
            c = float(rng.uniform(0.0, 3.0))
            rho_a = tv.perron(A).rho
            rho_shift = tv.perron(A + c * np.eye(4)).rho
            assert abs(rho_shift - (rho_a + c)) < 1e-9

    def test_against_characteristic_polynomial_oracle(self):
        rng = np.random.Generator(np.random.PCG64(11))
        for _ in range(50):
            n = int(rng.integers(2, 6))
            A = random_irreducible(rng, n)
            assert abs(tv.perron(A).rho - char_poly_radius(A)) < 1e-8


class TestSpectralAbscissa:
    def test_negative_identity(self):
        assert abs(tv.spectral_abscissa_metzler(-np.eye(4)) - (-1.0)) < 1e-12

    def test_cycle_shifted(self):
        # eigenvalues of the weighted 4-cycle are 1.5 * {1, i, -1, -i}
        assert abs(tv.spectral_abscissa_metzler(-np.eye(4) + 1.5 * CYCLE4) - 0.5) < 1e-10

    def test_singular_at_endemic_equilibrium(self):
        system = builtin_example(1).system
        x_tilde = tv.single_virus_endemic(system.D[0], system.B[0])
        M = -np.diag(system.D[0]) + (1 - x_tilde)[:, None] * system.B[0]
        assert abs(tv.spectral_abscissa_metzler(M)) < 1e-10

    def test_not_metzler_rejected(self):
        with pytest.raises(NotMetzler):
            tv.spectral_abscissa_metzler([[1.0, -0.1], [0.2, 1.0]])

    def test_defective_dominant_structure_fails_honestly(self):
        # shifted matrix is a Jordan block: power iteration converges only
        # harmonically, so the cap reports NoConvergence instead of a value
        from trivirus.errors import NoConvergence

        with pytest.raises(NoConvergence):
            tv.spectral_abscissa_metzler([[0.0, 1.0], [0.0, 0.0]])


class TestSymmetricEigenvalues:
    def test_two_node_lyapunov_block(self):
        eigs = tv.symmetric_eigenvalues([[4.0, -4.0], [-4.0, 4.0]])
        assert np.allclose(eigs, [0.0, 8.0], atol=1e-12)

    def test_identity(self):
        assert np.allclose(tv.symmetric_eigenvalues(np.eye(3)), [1, 1, 1])

    def test_diagonal_sorted(self):
        eigs = tv.symmetric_eigenvalues(np.diag([5.0, -1.0, 2.0]))
        assert np.allclose(eigs, [-1.0, 2.0, 5.0])

    def test_not_symmetric_rejected(self):
        with pytest.raises(NotSymmetric):
            tv.symmetric_eigenvalues([[0.0, 1.0], [0.0, 0.0]])

    def test_trace_and_frobenius_consistency(self):
        rng = np.random.Generator(np.random.PCG64(23))
        for _ in range(20):
            n = int(rng.integers(2, 8))
            M = rng.normal(size=(n, n))
            S = M + M.T
            eigs = tv.symmetric_eigenvalues(S, tol=1e-10)
            assert abs(eigs.sum() - np.trace(S)) < 1e-8
            assert abs(np.sum(eigs**2) - np.sum(S * S)) < 1e-8


class TestPositiveSemidefinite:
    def test_lyapunov_block(self):
        assert tv.is_positive_semidefinite([[4.0, -4.0], [-4.0, 4.0]])

    def test_indefinite(self):
        assert not tv.is_positive_semidefinite([[0.0, 1.0], [1.0, 0.0]])

    def test_zero_matrix(self):
        assert tv.is_positive_semidefinite(np.zeros((3, 3)))
