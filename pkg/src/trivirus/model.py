"""Core types and right-hand side of the competitive multi-virus SIS model.

A system of m competing viruses on n population nodes evolves as

    dx^k/dt = (-D^k + (I - sum_l X^l) B^k) x^k,       k = 1..m,

where x^k in [0,1]^n holds per-node infected fractions for virus k,
X^l = diag(x^l), D^k is the positive diagonal healing-rate matrix and
B^k the nonnegative infection matrix of virus k. Competition enters only
through the shared susceptible fraction 1 - sum_l x_i^l at each node.

States live in the invariant domain

    D = { x : 0 <= x_i^k <= 1,  sum_k x_i^k <= 1  for every node i },

which the dynamics never leave. Stacking is virus-major throughout:
the flat vector is (x^1, x^2, ..., x^m) and all Jacobian block indexing
follows that order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeInfectionRate,
    NonPositiveHealingRate,
)
from .spectral import is_irreducible

DEFAULT_DOMAIN_TOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MultiVirusSystem:
    """Validated parameter bundle of an m-virus SIS model on n nodes.

    Attributes:
        n: node count (>= 2).
        m: virus count (>= 1; the tri-virus analyses require m == 3).
        D: healing rates, shape (m, n); row k is the diagonal of D^k.
        B: infection matrices, shape (m, n, n); B[k][i, j] is the rate at
            which virus-k infection at node j infects node i.
        irreducible_flags: per-virus flag, True iff B^k is irreducible.
    """

    n: int
    m: int
    D: np.ndarray
    B: np.ndarray
    irreducible_flags: tuple[bool, ...]

    def healing(self, k: int) -> np.ndarray:
        """Diagonal of D^k as a length-n vector."""
        return self.D[k]

    def infection(self, k: int) -> np.ndarray:
        """Infection matrix B^k, shape (n, n)."""
        return self.B[k]


@dataclass(frozen=True)
class SystemState:
    """Stacked infection-fraction state (x^1, ..., x^m) at time t."""

    x: np.ndarray  # shape (m, n), read-only
    t: float = 0.0

    @property
    def m(self) -> int:
        return self.x.shape[0]

    @property
    def n(self) -> int:
        return self.x.shape[1]

    def stacked(self) -> np.ndarray:
        """Flat copy in virus-major order, shape (m*n,)."""
        return self.x.reshape(-1).copy()

    @staticmethod
    def from_stacked(flat: np.ndarray, m: int, n: int, t: float = 0.0) -> "SystemState":
        flat = np.asarray(flat, dtype=float)
        if flat.size != m * n:
            raise DimensionMismatch(f"stacked vector has {flat.size} entries, expected {m * n}")
        return SystemState(x=_readonly(flat.reshape(m, n)), t=float(t))

    @staticmethod
    def from_blocks(blocks, t: float = 0.0) -> "SystemState":
        """Build a state from m per-virus vectors of equal length."""
        x = np.vstack([np.asarray(b, dtype=float) for b in blocks])
        return SystemState(x=_readonly(x), t=float(t))


def build_system(D_list, B_list) -> MultiVirusSystem:
    """Validate parameters and assemble a MultiVirusSystem.

    Args:
        D_list: m vectors of length n, the diagonals of the healing matrices.
        B_list: m matrices of shape (n, n), the infection matrices.

    Raises:
        DimensionMismatch: virus counts differ, n < 2, or shapes disagree.
        NonPositiveHealingRate: some healing rate <= 0.
        NegativeInfectionRate: some infection rate < 0.
    """
    if len(D_list) == 0 or len(D_list) != len(B_list):
        raise DimensionMismatch(
            f"virus counts differ: {len(D_list)} healing vectors, {len(B_list)} infection matrices"
        )
    m = len(D_list)
    D = np.asarray([np.asarray(d, dtype=float).reshape(-1) for d in D_list])
    n = D.shape[1]
    if n < 2:
        raise DimensionMismatch(f"node count must be >= 2, got {n}")
    B = np.empty((m, n, n), dtype=float)
    for k, Bk in enumerate(B_list):
        Bk = np.asarray(Bk, dtype=float)
        if Bk.shape != (n, n):
            raise DimensionMismatch(f"infection matrix {k} has shape {Bk.shape}, expected {(n, n)}")
        B[k] = Bk
    if np.any(D <= 0.0):
        raise NonPositiveHealingRate("all healing rates must be strictly positive")
    if np.any(B < 0.0):
        raise NegativeInfectionRate("all infection rates must be nonnegative")
    flags = tuple(bool(is_irreducible(B[k])) for k in range(m))
    return MultiVirusSystem(n=n, m=m, D=_readonly(D), B=_readonly(B), irreducible_flags=flags)


def _check_dims(system: MultiVirusSystem, state: SystemState) -> None:
    if state.x.shape != (system.m, system.n):
        raise DimensionMismatch(
            f"state shape {state.x.shape} does not match system ({system.m}, {system.n})"
        )


def in_domain(state: SystemState, tol: float = DEFAULT_DOMAIN_TOL) -> bool:
    """True iff every coordinate is in [-tol, 1+tol] and node sums are <= 1+tol."""
    x = state.x
    if np.min(x) < -tol or np.max(x) > 1.0 + tol:
        return False
    return bool(np.max(x.sum(axis=0)) <= 1.0 + tol)


def domain_excursion(x: np.ndarray) -> float:
    """Worst excursion of raw state array x (shape (m, n)) beyond the domain.

    Zero when x is inside; otherwise the largest of coordinate undershoot,
    coordinate overshoot, and node-sum overshoot.
    """
    worst = max(0.0, float(-np.min(x)), float(np.max(x) - 1.0))
    return max(worst, float(np.max(x.sum(axis=0)) - 1.0))


def vector_field_flat(system: MultiVirusSystem, x: np.ndarray) -> np.ndarray:
    """Right-hand side on a raw (m, n) array; returns an (m, n) array.

    Hot path for the integrator: no state wrapping, no domain checks.
    """
    s = 1.0 - x.sum(axis=0)
    return np.einsum("kij,kj->ki", system.B, x) * s - system.D * x


def vector_field(system: MultiVirusSystem, state: SystemState) -> np.ndarray:
    """Time derivative of the stacked state, shape (m*n,), virus-major.

    The field is evaluated as given even outside the invariant domain
    (callers flag such states via in_domain; nothing is clamped here).
    """
    _check_dims(system, state)
    return vector_field_flat(system, state.x).reshape(-1)


def jacobian(system: MultiVirusSystem, state: SystemState) -> np.ndarray:
    """Jacobian of the stacked dynamics, shape (m*n, m*n).

    Block (k, k) is -D^k + (I - sum_l X^l) B^k - diag(B^k x^k); block
    (k, l) for l != k is -diag(B^k x^k). The off-diagonal sign pattern is
    state-independent on the interior of the domain: within-virus entries
    carry the sign of B^k[i, j], cross-virus blocks are nonpositive
    diagonal.
    """
    _check_dims(system, state)
    m, n = system.m, system.n
    x = state.x
    s = 1.0 - x.sum(axis=0)
    J = np.zeros((m * n, m * n))
    for k in range(m):
        Bx = system.B[k] @ x[k]
        rows = slice(k * n, (k + 1) * n)
        for l in range(m):
            cols = slice(l * n, (l + 1) * n)
            if l == k:
                block = s[:, None] * system.B[k]
                block = block - np.diag(system.D[k] + Bx)
                J[rows, cols] = block
            else:
                J[rows, cols] = -np.diag(Bx)
    return J


__all__ = [
    "DEFAULT_DOMAIN_TOL",
    "MultiVirusSystem",
    "SystemState",
    "build_system",
    "domain_excursion",
    "in_domain",
    "jacobian",
    "vector_field",
    "vector_field_flat",
]
