import numpy as np
import pytest

import trivirus as tv
from trivirus import stability
from trivirus.errors import (
    CertificateMismatch,
    ConstructionMismatch,
    NotIrreducible,
    SubThresholdSystem,
)
from trivirus.model import SystemState
from trivirus.scenarios import builtin_example

from helpers import CYCLE4, random_identical_system, random_system


@pytest.fixture(scope="module")
def preset1():
    return builtin_example(1).system


class TestDfeReport:
    def test_subcritical_cycles_ges(self):
        B = 0.5 * CYCLE4
        system = tv.build_system([np.ones(4)] * 3, [B, B, B])
        rep = tv.dfe_report(system)
        assert np.allclose(rep.abscissas, -0.5, atol=1e-10)
        assert rep.verdict == stability.GES

    def test_benchmark_not_unique(self, preset1):
        rep = tv.dfe_report(preset1)
        assert np.all(rep.abscissas > 0)
        assert rep.verdict == stability.NOT_UNIQUE

    def test_critical_case(self):
        B = 1.0 * CYCLE4  # abscissa exactly zero
        system = tv.build_system([np.ones(4)] * 3, [B, B, B])
        rep = tv.dfe_report(system)
        assert rep.verdict == stability.ASYMPTOTICALLY_STABLE_UNIQUE


class TestBoundaryStability:
    def test_benchmark_virus0_stable(self, preset1):
        v = tv.boundary_stability(preset1, 0)
        rhos = dict(v.rho_values)
        assert abs(rhos[1] - 0.9829) < 1e-3
        assert abs(rhos[2] - 0.99624) < 1e-3
        assert v.verdict == stability.LOCALLY_EXPONENTIALLY_STABLE

    def test_benchmark_virus1_unstable(self, preset1):
        v = tv.boundary_stability(preset1, 1)
        rhos = dict(v.rho_values)
        assert abs(rhos[0] - 1.0174) < 1e-3
        assert abs(rhos[2] - 1.0127) < 1e-3
        assert v.verdict == stability.UNSTABLE

    def test_benchmark_virus2_unstable(self, preset1):
        v = tv.boundary_stability(preset1, 2)
        rhos = dict(v.rho_values)
        assert abs(rhos[0] - 1.003) < 1e-3
        assert abs(rhos[1] - 0.9863) < 1e-3
        assert v.verdict == stability.UNSTABLE

    def test_preset2_cross_radius(self):
        system = builtin_example(2).system
        v = tv.boundary_stability(system, 0)
        assert abs(dict(v.rho_values)[2] - 1.0037) < 1e-3
        assert v.verdict == stability.UNSTABLE
        assert tv.boundary_stability(system, 2).verdict == stability.LOCALLY_EXPONENTIALLY_STABLE

    def test_sub_threshold_virus_rejected(self):
        B = 0.5 * CYCLE4
        system = tv.build_system([np.ones(4)] * 3, [B, 1.5 * CYCLE4, 1.5 * CYCLE4.T])
        with pytest.raises(SubThresholdSystem):
            tv.boundary_stability(system, 0)

    def test_sign_equivalence_of_spectral_conditions(self):
        # s(-D^l + (I - X~^k) B^l) and rho((I - X~^k)(D^l)^-1 B^l) - 1 share sign
        rng = np.random.Generator(np.random.PCG64(77))
        for _ in range(15):
            system = random_system(rng, int(rng.integers(2, 6)))
            for k in range(3):
                try:
                    x_tilde = tv.single_virus_endemic(system.D[k], system.B[k])
                except SubThresholdSystem:
                    continue
                for l in range(3):
                    if l == k:
                        continue
                    M = (1 - x_tilde)[:, None] * system.B[l]
                    s = tv.spectral_abscissa_metzler(-np.diag(system.D[l]) + M)
                    rho = tv.perron(M / system.D[l][:, None]).rho
                    if abs(s) > 1e-9 or abs(rho - 1) > 1e-9:
                        assert np.sign(s) == np.sign(rho - 1.0)


class TestLineStability:
    def test_preset4_attractive(self):
        scn = builtin_example(4)
        _, con = tv.construct_line_system(scn.system.B[0], scn.system.B[2], scn.line_C)
        v = tv.line_stability(scn.system, con)
        assert abs(v.rho_value - 0.9911) < 1e-3
        assert v.verdict == stability.LOCALLY_EXPONENTIALLY_ATTRACTIVE

    def test_preset3_unstable(self):
        scn = builtin_example(3)
        _, con = tv.construct_line_system(scn.system.B[0], scn.system.B[2], scn.line_C)
        v = tv.line_stability(scn.system, con)
        assert abs(v.rho_value - 1.0043) < 1e-3
        assert v.verdict == stability.UNSTABLE

    def test_marginal_when_third_layer_shares_equilibrium(self):
        scn = builtin_example(3)
        B1 = scn.system.B[0]
        system, con = tv.construct_line_system(B1, B1, scn.line_C)
        v = tv.line_stability(system, con)
        assert v.verdict == stability.MARGINAL
        assert abs(v.rho_value - 1.0) < 1e-9

    def test_mismatched_system_rejected(self):
        scn = builtin_example(4)
        _, con = tv.construct_line_system(scn.system.B[0], scn.system.B[2], scn.line_C)
        other = builtin_example(1).system  # different B2
        with pytest.raises(ConstructionMismatch):
            tv.line_stability(other, con)


class TestCheckIdenticalViruses:
    def test_three_copies(self):
        B = 1.5 * CYCLE4
        system = tv.build_system([np.ones(4)] * 3, [B] * 3)
        assert tv.check_identical_viruses(system)

    def test_benchmark_differs(self, preset1):
        assert not tv.check_identical_viruses(preset1)

    def test_tolerance_semantics(self):
        B = 1.5 * CYCLE4
        B2 = B.copy()
        B2[0, 3] += 1e-15
        system = tv.build_system([np.ones(4)] * 3, [B, B2, B])
        assert tv.check_identical_viruses(system, tol=1e-12)
        assert not tv.check_identical_viruses(system, tol=1e-16)


class TestLyapunovCertificate:
    def test_two_node_closed_form(self):
        cert = tv.lyapunov_certificate([1.0, 1.0], [[0, 2.0], [2.0, 0]])
        assert np.allclose(cert.x_tilde, 0.5, atol=1e-12)
        assert np.allclose(cert.u_tilde, 1.0, atol=1e-10)
        assert np.allclose(cert.p_diag, 2.0, atol=1e-10)
        assert np.allclose(cert.Q_bar, [[4.0, -4.0], [-4.0, 4.0]], atol=1e-9)
        assert abs(cert.lambda2 - 8.0) < 1e-8
        assert abs(cert.p_max - 2.0) < 1e-10
        assert abs(cert.p_min - 2.0) < 1e-10
        assert abs(cert.lambda_bar - 4.0) < 1e-8

    def test_benchmark_cycle_uniform_vectors(self):
        cert = tv.lyapunov_certificate(np.ones(4), 1.5 * CYCLE4)
        assert np.max(np.abs(cert.x_tilde - 1.0 / 3.0)) < 1e-10
        assert np.max(np.abs(cert.u_tilde - 0.75)) < 1e-9
        assert np.max(np.abs(cert.p_diag - 2.25)) < 1e-8
        eigs = tv.symmetric_eigenvalues(cert.Q_bar, tol=1e-9)
        assert abs(eigs[0]) < 1e-9 and eigs[1] > 1e-3  # PSD, rank n-1
        assert np.max(np.abs(cert.Q_bar @ cert.x_tilde)) < 1e-9

    def test_reducible_rejected(self):
        with pytest.raises(NotIrreducible):
            tv.lyapunov_certificate([1.0, 1.0], [[2.0, 1.0], [0.0, 2.0]])

    def test_sub_threshold_rejected(self):
        with pytest.raises(SubThresholdSystem):
            tv.lyapunov_certificate(np.ones(4), 0.5 * CYCLE4)

    def test_identities_on_random_systems(self):
        rng = np.random.Generator(np.random.PCG64(13))
        for _ in range(10):
            _, d, B = random_identical_system(rng, int(rng.integers(2, 6)))
            cert = tv.lyapunov_certificate(d, B, tol=1e-9)
            assert np.max(np.abs(cert.Q @ cert.x_tilde)) <= 1e-9
            assert np.max(np.abs(cert.u_tilde @ cert.Q)) <= 1e-9
            assert abs(cert.u_tilde @ cert.x_tilde - 1.0) <= 1e-12
            eigs = tv.symmetric_eigenvalues(cert.Q_bar, tol=1e-8)
            assert -1e-9 <= eigs[0] <= 1e-9
            assert eigs[1] >= 1e-9
            assert np.max(np.abs(cert.Q_bar @ cert.x_tilde)) <= 1e-9 * cert.n

    def test_euclidean_eigen_floor_for_uniform_structure(self):
        # when u~ is proportional to x~, the perpendicular subspace excludes
        # the null direction and lambda2 bounds the Rayleigh quotient directly
        cert = tv.lyapunov_certificate(np.ones(4), 1.5 * CYCLE4)
        rng = np.random.Generator(np.random.PCG64(6))
        z = rng.normal(size=(1000, 4))
        u = cert.u_tilde
        z -= np.outer(z @ u, u) / (u @ u)
        lhs = np.einsum("si,ij,sj->s", z, cert.Q_bar, z)
        rhs = cert.lambda2 * np.einsum("si,si->s", z, z)
        assert np.all(lhs >= rhs - 1e-8)

    def test_weighted_eigen_floor_on_random_systems(self):
        # general systems obey the P-weighted floor z'Qbar z >= lambda_bar z'Pz
        rng = np.random.Generator(np.random.PCG64(21))
        for _ in range(5):
            _, d, B = random_identical_system(rng, int(rng.integers(2, 6)))
            cert = tv.lyapunov_certificate(d, B)
            z = rng.normal(size=(1000, cert.n))
            u = cert.u_tilde
            z -= np.outer(z @ u, u) / (u @ u)
            lhs = np.einsum("si,ij,sj->s", z, cert.Q_bar, z)
            rhs = cert.lambda_bar * np.einsum("si,i,si->s", z, cert.p_diag, z)
            assert np.all(lhs >= rhs - 1e-9)

    def test_p_sandwich(self):
        rng = np.random.Generator(np.random.PCG64(37))
        _, d, B = random_identical_system(rng, 5)
        cert = tv.lyapunov_certificate(d, B)
        z = rng.normal(size=(1000, 5))
        quad = np.einsum("si,i,si->s", z, cert.p_diag, z)
        norm2 = np.einsum("si,si->s", z, z)
        assert np.all(quad <= cert.p_max * norm2 + 1e-12)
        assert np.all(quad >= cert.p_min * norm2 - 1e-12)


@pytest.fixture(scope="module")
def two_node_setup():
    d = np.array([1.0, 1.0])
    B = np.array([[0.0, 2.0], [2.0, 0.0]])
    cert = tv.lyapunov_certificate(d, B)
    system = tv.build_system([d] * 3, [B] * 3)
    return cert, system


class TestLyapunovTrace:
    def test_on_plane_v_is_zero(self, two_node_setup):
        cert, system = two_node_setup
        x0 = SystemState.from_blocks([0.2 * cert.x_tilde, 0.3 * cert.x_tilde, 0.5 * cert.x_tilde])
        traj = tv.integrate(system, x0, 50.0)
        tr = tv.lyapunov_trace(cert, traj, 0)
        assert np.max(tr.V) < 1e-20
        assert np.all(tr.bound_ok)

    def test_interior_start_bound_holds(self, two_node_setup):
        cert, system = two_node_setup
        x0 = tv.random_initial_condition(2, 3, 42)
        traj = tv.integrate(system, x0, 200.0)
        for k in range(3):
            tr = tv.lyapunov_trace(cert, traj, k)
            skip = max(1, int(0.05 * len(tr.t)))
            assert tr.bound_ok[skip:].mean() >= 0.99
        assert tr.fitted_rate > 0

    def test_projection_kills_u_component(self, two_node_setup):
        cert, system = two_node_setup
        x0 = tv.random_initial_condition(2, 3, 9)
        traj = tv.integrate(system, x0, 50.0)
        R = np.eye(2) - np.outer(cert.x_tilde, cert.u_tilde)
        zeta = traj.states[:, 1, :] @ R.T
        assert np.max(np.abs(zeta @ cert.u_tilde)) < 1e-10

    def test_dimension_mismatch_rejected(self, two_node_setup):
        cert, _ = two_node_setup
        other = tv.build_system([np.ones(4)] * 3, [1.5 * CYCLE4] * 3)
        x0 = tv.random_initial_condition(4, 3, 3)
        traj = tv.integrate(other, x0, 5.0)
        with pytest.raises(CertificateMismatch):
            tv.lyapunov_trace(cert, traj, 0)
        cert4 = tv.lyapunov_certificate(np.ones(4), 1.5 * CYCLE4)
        with pytest.raises(CertificateMismatch):
            tv.lyapunov_trace(cert4, traj, 5)


def test_boundary_jacobian_block_structure(preset1):
    x_tilde = tv.single_virus_endemic(preset1.D[0], preset1.B[0])
    state = SystemState.from_blocks([x_tilde, np.zeros(4), np.zeros(4)])
    J = tv.jacobian(preset1, state)
    n = 4
    for k, l in [(1, 0), (2, 0), (2, 1)]:
        assert np.max(np.abs(J[k * n : (k + 1) * n, l * n : (l + 1) * n])) <= 1e-12
