"""Shared builders and independent oracles for the test suite.

The oracles here deliberately avoid the library's own numerical paths:
the characteristic polynomial comes from the Faddeev-LeVerrier recursion
with roots via numpy's companion-matrix solver, and Jacobians are checked
by central finite differences of the vector field.
"""

from __future__ import annotations

import numpy as np

import trivirus as tv
from trivirus.model import MultiVirusSystem, SystemState

CYCLE4 = np.array(
    [
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)


def cycle_matrix(n: int, weight: float = 1.0) -> np.ndarray:
    """Weighted n-cycle adjacency: node i infects node i+1 (mod n)."""
    return weight * np.eye(n)[:, np.roll(np.arange(n), 1)].T.copy()


def random_irreducible(rng: np.random.Generator, n: int, density: float = 0.6, scale: float = 1.5) -> np.ndarray:
    """Random nonnegative irreducible matrix: sparse uniform mass plus a
    weighted cycle that guarantees strong connectivity."""
    M = rng.uniform(0.0, scale, (n, n)) * (rng.random((n, n)) < density)
    M += rng.uniform(0.2, 1.0) * cycle_matrix(n)
    return M


def random_system(rng: np.random.Generator, n: int, m: int = 3) -> MultiVirusSystem:
    D = [rng.uniform(0.3, 2.0, n) for _ in range(m)]
    B = [random_irreducible(rng, n) for _ in range(m)]
    return tv.build_system(D, B)


def random_identical_system(rng: np.random.Generator, n: int, m: int = 3):
    """Identical-virus system with rho(D^-1 B) scaled into [1.5, 2.5].

    Returns (system, d, B).
    """
    d = rng.uniform(0.4, 1.6, n)
    B = random_irreducible(rng, n, density=0.7)
    rho = tv.perron(B / d[:, None]).rho
    B *= rng.uniform(1.5, 2.5) / rho
    return tv.build_system([d] * m, [B] * m), d, B


def random_interior_state(rng: np.random.Generator, n: int, m: int) -> SystemState:
    """Strictly interior state: normalized uniform shares with one withheld."""
    p = rng.random((n, m + 1))
    return SystemState.from_blocks((p[:, :m] / p.sum(axis=1, keepdims=True)).T)


def char_poly_radius(A: np.ndarray) -> float:
    """Spectral radius via the Faddeev-LeVerrier characteristic polynomial.

    Independent of power iteration: coefficients come from the trace
    recursion M_k = A (M_{k-1} - c_{k-1} I), c_k = tr(M_k)/k, and the roots
    from numpy's companion-matrix eigenvalues.
    """
    n = A.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    M = np.zeros_like(A)
    c_prev = 0.0
    for k in range(1, n + 1):
        M = A @ (M - c_prev * np.eye(n)) if k > 1 else A.copy()
        c_prev = np.trace(M) / k
        coeffs[k] = -c_prev
    roots = np.roots(coeffs)
    return float(np.max(np.abs(roots)))


def fd_jacobian(system: MultiVirusSystem, state: SystemState, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of the vector field."""
    N = system.m * system.n
    flat = state.stacked()
    J = np.empty((N, N))
    for j in range(N):
        plus = flat.copy()
        minus = flat.copy()
        plus[j] += h
        minus[j] -= h
        fp = tv.vector_field(system, SystemState.from_stacked(plus, system.m, system.n))
        fm = tv.vector_field(system, SystemState.from_stacked(minus, system.m, system.n))
        J[:, j] = (fp - fm) / (2.0 * h)
    return J
