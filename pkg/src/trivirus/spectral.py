"""Nonnegative-matrix and Metzler-matrix spectral computations.

Every stability decision in this package reduces to one of three
primitives, so general nonsymmetric eigensolvers are deliberately absent:

  * the Perron radius (and strictly positive eigenvector pair) of an
    irreducible nonnegative matrix, by power iteration on A + I;
  * the spectral abscissa of a Metzler matrix, by shifting it into the
    nonnegative cone;
  * the full real spectrum of a symmetric matrix, by cyclic Jacobi
    rotations.

Power iteration runs on A + I, never on A: irreducibility plus a positive
diagonal makes the iteration matrix primitive, so convergence holds even
for periodic patterns such as weighted cycles. The exact unit shift is
subtracted from the converged radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEntry,
    NoConvergence,
    NotIrreducible,
    NotMetzler,
    NotSymmetric,
)

DEFAULT_TOL = 1e-12


def _as_square(A: np.ndarray, what: str) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{what} must be a square matrix, got shape {A.shape}")
    return A


def is_irreducible(A) -> bool:
    """True iff the digraph with an edge j -> i whenever A[i, j] != 0 is
    strongly connected.

    Raises:
        NegativeEntry: A has a negative entry (only nonnegative matrices
            carry the irreducibility notion used here).
    """
    A = _as_square(A, "irreducibility input")
    if np.any(A < 0.0):
        raise NegativeEntry("irreducibility is defined here for nonnegative matrices")
    n = A.shape[0]
    if n == 1:
        return True
    pattern = A != 0.0
    for adj in (pattern, pattern.T):
        # boolean closure: node j reaches node i along column->row edges
        reach = np.zeros(n, dtype=bool)
        reach[0] = True
        for _ in range(n):
            grown = reach | (adj @ reach)
            if np.array_equal(grown, reach):
                break
            reach = grown
        if not reach.all():
            return False
    return True


def _power_radius(A: np.ndarray, tol: float) -> tuple[float, np.ndarray]:
    """Spectral radius and nonnegative eigenvector of a nonnegative matrix.

    Iterates on A + I from the uniform start vector, 1-norm normalized.
    Converged when the iterate change and the eigenvalue residual
    ||A v - rho v||_1 both drop below tol. No irreducibility is assumed;
    callers needing strictly positive vectors must check that themselves.
    """
    n = A.shape[0]
    M = A + np.eye(n)
    v = np.full(n, 1.0 / n)
    cap = 100 * n * max(1, math.ceil(math.log10(1.0 / tol)))
    for _ in range(cap):
        w = M @ v
        shifted = float(w.sum())  # 1-norm of a nonnegative vector
        v_new = w / shifted
        if np.abs(v_new - v).sum() < tol:
            residual = float(np.abs(M @ v_new - shifted * v_new).sum())
            if residual < tol:
                return shifted - 1.0, v_new
        v = v_new
    raise NoConvergence(
        f"power iteration did not reach tol={tol:g} within {cap} iterations"
    )


@dataclass(frozen=True)
class PerronTriple:
    """Spectral radius with right/left Perron vectors of an irreducible
    nonnegative matrix.

    right has unit 1-norm; left is normalized so that left . right = 1.
    Both are strictly positive for irreducible input.
    """

    rho: float
    right: np.ndarray
    left: np.ndarray


def perron(A, tol: float = DEFAULT_TOL) -> PerronTriple:
    """Perron radius and eigenvector pair of an irreducible nonnegative matrix.

    Deterministic: fixed uniform start vector, no randomized restarts.

    Raises:
        NegativeEntry: A has negative entries.
        NotIrreducible: A is reducible (the Perron vector would not be
            unique, so no convention is chosen).
        NoConvergence: iteration cap exceeded.
    """
    A = _as_square(A, "perron input")
    if np.any(A < 0.0):
        raise NegativeEntry("perron requires a nonnegative matrix")
    if not is_irreducible(A):
        raise NotIrreducible("perron requires an irreducible matrix")
    rho, right = _power_radius(A, tol)
    _, left = _power_radius(A.T, tol)
    left = left / float(left @ right)
    return PerronTriple(rho=rho, right=right, left=left)


def spectral_abscissa_metzler(M, tol: float = DEFAULT_TOL) -> float:
    """Largest real part among eigenvalues of a Metzler matrix.

    Computed as rho(M + cI) - c with c = 1 + max_i |M_ii|, which makes
    M + cI nonnegative with positive diagonal; the dominant eigenvalue of
    that shift is real and equals s(M) + c.

    Raises:
        NotMetzler: some off-diagonal entry is negative.
        NoConvergence: the shifted power iteration failed (possible only
            for defective dominant structure, which irreducible inputs
            never produce).
    """
    M = _as_square(M, "Metzler input")
    off = M - np.diag(np.diag(M))
    if np.any(off < 0.0):
        raise NotMetzler("spectral abscissa input must have nonnegative off-diagonals")
    c = 1.0 + float(np.max(np.abs(np.diag(M)))) if M.shape[0] else 1.0
    rho, _ = _power_radius(M + c * np.eye(M.shape[0]), tol)
    return rho - c


def symmetric_eigenvalues(S, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Full real spectrum of a symmetric matrix, ascending, via cyclic
    Jacobi rotations.

    Each returned eigenvalue satisfies ||S v - lambda v||_inf <= tol for
    its rotated eigenvector (tol is absolute).

    Raises:
        NotSymmetric: ||S - S^T||_inf exceeds tol.
        NoConvergence: sweeps exhausted before the off-diagonal mass or
            the residuals dropped below tolerance.
    """
    S = _as_square(S, "symmetric input")
    if float(np.max(np.abs(S - S.T), initial=0.0)) > tol:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    n = S.shape[0]
    if n == 1:
        return np.array([float(S[0, 0])])
    A = 0.5 * (S + S.T)
    V = np.eye(n)
    stop = 1e-14 * max(1.0, float(np.linalg.norm(A)))
    diag_mask = ~np.eye(n, dtype=bool)
    converged = False
    for _ in range(100):
        off = math.sqrt(float(np.sum(np.square(A[diag_mask]))))
        if off <= stop:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = 0.5 * (A[q, q] - A[p, p]) / apq
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                # A <- R^T A R with R the (p, q) plane rotation; the pivot
                # pair updates by +-t*apq, rows/cols mix with (c, s).
                app, aqq = A[p, p], A[q, q]
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                A[p, :] = A[:, p]
                A[q, :] = A[:, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    if not converged:
        raise NoConvergence("Jacobi sweeps exhausted before diagonalization")
    eigs = np.diag(A).copy()
    order = np.argsort(eigs)
    eigs = eigs[order]
    V = V[:, order]
    residual = float(np.max(np.abs(S @ V - V * eigs[None, :])))
    if residual > tol:
        raise NoConvergence(f"eigenpair residual {residual:g} exceeds tol={tol:g}")
    return eigs


def is_positive_semidefinite(S, tol: float = DEFAULT_TOL) -> bool:
    """True iff the smallest eigenvalue of symmetric S is >= -tol."""
    eigs = symmetric_eigenvalues(S, tol=max(tol, 1e-13))
    return bool(eigs[0] >= -tol)


__all__ = [
    "DEFAULT_TOL",
    "PerronTriple",
    "is_irreducible",
    "is_positive_semidefinite",
    "perron",
    "spectral_abscissa_metzler",
    "symmetric_eigenvalues",
]
