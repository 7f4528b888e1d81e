import numpy as np
import pytest

import trivirus as tv
from trivirus.errors import (
    DimensionMismatch,
    NegativeInfectionRate,
    NonPositiveHealingRate,
)
from trivirus.model import SystemState
from trivirus.scenarios import builtin_example

from helpers import CYCLE4, fd_jacobian, random_interior_state, random_system


@pytest.fixture(scope="module")
def preset1():
    return builtin_example(1).system


class TestBuildSystem:
    def test_benchmark_system_all_irreducible(self, preset1):
        assert preset1.n == 4 and preset1.m == 3
        assert preset1.irreducible_flags == (True, True, True)

    def test_zero_healing_rate_rejected(self):
        with pytest.raises(NonPositiveHealingRate):
            tv.build_system([[0.0, 1.0]], [[[0, 1], [1, 0]]])

    def test_negative_infection_rate_rejected(self):
        with pytest.raises(NegativeInfectionRate):
            tv.build_system([[1.0, 1.0]], [[[0, -0.5], [1, 0]]])

    def test_dimension_mismatches(self):
        with pytest.raises(DimensionMismatch):
            tv.build_system([[1, 1]], [])
        with pytest.raises(DimensionMismatch):
            tv.build_system([[1, 1]], [np.ones((3, 3))])
        with pytest.raises(DimensionMismatch):
            tv.build_system([[1.0]], [[[0.5]]])  # n = 1

    def test_disconnected_layer_flagged_reducible(self):
        # two 2-node components: strongly connected pieces, no cross edges
        B = np.zeros((4, 4))
        B[0, 1] = B[1, 0] = 1.0
        B[2, 3] = B[3, 2] = 1.0
        system = tv.build_system([np.ones(4)], [B])
        assert system.irreducible_flags == (False,)

    def test_deterministic(self):
        d = [[1.0, 2.0], [0.5, 0.7]]
        b = [[[0, 1], [2, 0]], [[0, 3], [1, 0]]]
        s1 = tv.build_system(d, b)
        s2 = tv.build_system(d, b)
        assert np.array_equal(s1.D, s2.D) and np.array_equal(s1.B, s2.B)
        assert s1.irreducible_flags == s2.irreducible_flags


class TestInDomain:
    def test_dfe_inside(self):
        state = SystemState.from_blocks(np.zeros((3, 4)))
        assert tv.in_domain(state, tol=0.0)

    def test_node_sum_violation(self):
        state = SystemState.from_blocks(np.full((3, 4), 0.4))
        assert not tv.in_domain(state, tol=0.0)

    def test_boundary_corner_inside(self):
        x = np.zeros((3, 4))
        x[0, 0] = 1.0
        assert tv.in_domain(SystemState.from_blocks(x), tol=0.0)

    def test_tolerance_band(self):
        x = np.zeros((3, 4))
        x[0, 0] = -1e-10
        assert tv.in_domain(SystemState.from_blocks(x), tol=1e-9)
        assert not tv.in_domain(SystemState.from_blocks(x), tol=1e-11)


class TestVectorField:
    def test_disease_free_is_equilibrium(self, preset1):
        state = SystemState.from_blocks(np.zeros((3, 4)))
        assert np.all(tv.vector_field(preset1, state) == 0.0)

    def test_single_virus_symmetric_pair_closed_form(self):
        # symmetric 2-cycle with rate b: endemic point is (1 - 1/b) * ones
        system = tv.build_system([[1.0, 1.0]], [[[0, 2.0], [2.0, 0]]])
        state = SystemState.from_blocks([[0.5, 0.5]])
        assert np.max(np.abs(tv.vector_field(system, state))) < 1e-15

    def test_line_midpoint_is_equilibrium(self):
        system = builtin_example(3).system
        z = np.full(4, 1.0 / 3.0)
        state = SystemState.from_blocks([z / 2, z / 2, np.zeros(4)])
        assert np.max(np.abs(tv.vector_field(system, state))) < 1e-15

    def test_dimension_mismatch(self, preset1):
        with pytest.raises(DimensionMismatch):
            tv.vector_field(preset1, SystemState.from_blocks(np.zeros((3, 5))))


class TestJacobian:
    def test_block_diagonal_at_dfe(self, preset1):
        state = SystemState.from_blocks(np.zeros((3, 4)))
        J = tv.jacobian(preset1, state)
        for k in range(3):
            block = J[4 * k : 4 * k + 4, 4 * k : 4 * k + 4]
            expected = -np.diag(preset1.D[k]) + preset1.B[k]
            assert np.allclose(block, expected, atol=1e-15)
            for l in range(3):
                if l != k:
                    off = J[4 * k : 4 * k + 4, 4 * l : 4 * l + 4]
                    assert np.all(off == 0.0)

    def test_block_upper_triangular_at_boundary(self, preset1):
        x_tilde = tv.single_virus_endemic(preset1.D[0], preset1.B[0])
        state = SystemState.from_blocks([x_tilde, np.zeros(4), np.zeros(4)])
        J = tv.jacobian(preset1, state)
        n = 4
        for k, l in [(1, 0), (2, 0), (2, 1)]:
            assert np.max(np.abs(J[k * n : (k + 1) * n, l * n : (l + 1) * n])) <= 1e-12
        block22 = J[n : 2 * n, n : 2 * n]
        expected = -np.diag(preset1.D[1]) + (1 - x_tilde)[:, None] * preset1.B[1]
        assert np.allclose(block22, expected, atol=1e-14)

    def test_matches_finite_differences(self, preset1):
        rng = np.random.Generator(np.random.PCG64(2024))
        for _ in range(20):
            state = random_interior_state(rng, 4, 3)
            J = tv.jacobian(preset1, state)
            J_fd = fd_jacobian(preset1, state)
            scale = max(1.0, float(np.max(np.abs(J))))
            assert np.max(np.abs(J - J_fd)) <= 1e-6 * scale

    def test_off_diagonal_sign_pattern_state_independent(self):
        rng = np.random.Generator(np.random.PCG64(5))
        system = random_system(rng, 4)
        n, m = system.n, system.m
        reference = None
        for _ in range(10):
            state = random_interior_state(rng, n, m)
            J = tv.jacobian(system, state)
            signs = np.sign(J)
            np.fill_diagonal(signs, 0.0)
            if reference is None:
                reference = signs
            else:
                assert np.array_equal(signs, reference)
        # cross blocks nonpositive diagonal; within-block signs follow B
        for k in range(m):
            for l in range(m):
                block = reference[k * n : (k + 1) * n, l * n : (l + 1) * n]
                if k == l:
                    off_mask = ~np.eye(n, dtype=bool)
                    assert np.array_equal(
                        block[off_mask] > 0, system.B[k][off_mask] > 0
                    )
                else:
                    assert np.all(block <= 0.0)
                    assert np.all(block[~np.eye(n, dtype=bool)] == 0.0)


def test_cycle4_matches_benchmark_layer(preset1):
    assert np.array_equal(preset1.B[0], 1.5 * CYCLE4)
