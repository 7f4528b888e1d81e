"""Equilibrium computation for the competitive multi-virus SIS model.

Covers every equilibrium class the tri-virus system exhibits: the
disease-free equilibrium, single-virus boundary equilibria, explicitly
constructed one-parameter lines and two-parameter planes of coexistence
equilibria, and generic coexistence points found by damped Newton
iteration.

Descriptors store generators (the endemic vector z for a line, the anchor
x_tilde for a plane) rather than sampled points, so membership and
residuals can be evaluated exactly at any parameter value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .errors import (
    DimensionMismatch,
    EigvecMismatch,
    NoConvergence,
    NonPositiveHealingRate,
    NotAnEquilibrium,
    NotIrreducible,
    ParameterOutOfRange,
    SingularJacobian,
    SubThresholdSystem,
)
from .model import MultiVirusSystem, SystemState
from .spectral import is_irreducible, spectral_abscissa_metzler

FIXED_POINT_TOL = 1e-12
NEWTON_TOL = 1e-10
ZERO_BLOCK_TOL = 1e-8

KIND_DFE = "DFE"
KIND_BOUNDARY = "Boundary"
KIND_LINE = "LineSegment"
KIND_PLANE = "Plane"
KIND_COEXISTENCE = "CoexistencePoint"


@dataclass(frozen=True)
class EquilibriumDescriptor:
    """An equilibrium point or connected family, with solver evidence.

    kind is one of KIND_DFE, KIND_BOUNDARY, KIND_LINE, KIND_PLANE,
    KIND_COEXISTENCE. virus is the 0-based surviving index for boundary
    equilibria. line_z generates the segment (b*z, (1-b)*z, 0) for
    b in [0, 1]; plane_anchor x~ generates (a1*x~, a2*x~, a3*x~) over the
    weight simplex. residual is the worst vector-field max-norm over the
    base point and, for families, 11 uniformly placed members.
    """

    kind: str
    base_point: SystemState
    residual: float
    virus: int | None = None
    line_z: np.ndarray | None = None
    plane_anchor: np.ndarray | None = None
    plane_alpha: np.ndarray | None = None


@dataclass(frozen=True)
class LineConstruction:
    """Generator data for an explicitly constructed line of equilibria.

    z is the endemic equilibrium shared by viruses 0 and 1 (healing rates
    all one); C is nonnegative irreducible with C z = z; B2 = (I-Z)^-1 C
    is the infection matrix that makes every (b*z, (1-b)*z, 0) stationary.
    """

    z: np.ndarray
    C: np.ndarray
    B2: np.ndarray


def _residual_at(system: MultiVirusSystem, state: SystemState) -> float:
    return float(np.max(np.abs(model.vector_field(system, state))))


def single_virus_endemic(d, B, tol: float = FIXED_POINT_TOL, max_iter: int = 500_000) -> np.ndarray:
    """Unique strictly positive equilibrium of one virus in isolation.

    Solves (-D + (I - X)B)x = 0 by the monotone fixed-point map

        x_i <- (Bx)_i / (d_i + (Bx)_i)

    started from the all-ones vector, which decreases componentwise to the
    equilibrium; iteration stops when the equation residual (max-norm)
    drops below tol.

    Raises:
        NotIrreducible: B is reducible.
        SubThresholdSystem: s(B - D) <= 0, so no endemic equilibrium exists.
        NoConvergence: iteration cap reached.
    """
    d = np.asarray(d, dtype=float).reshape(-1)
    B = np.asarray(B, dtype=float)
    if B.shape != (d.size, d.size):
        raise DimensionMismatch(f"B has shape {B.shape}, healing vector has length {d.size}")
    if np.any(d <= 0.0):
        raise NonPositiveHealingRate("healing rates must be strictly positive")
    if not is_irreducible(B):
        raise NotIrreducible("endemic equilibrium requires an irreducible infection matrix")
    if spectral_abscissa_metzler(B - np.diag(d)) <= 0.0:
        raise SubThresholdSystem("s(B - D) <= 0: the only equilibrium is disease-free")
    x = np.ones_like(d)
    for _ in range(max_iter):
        Bx = B @ x
        x = Bx / (d + Bx)
        Bx = B @ x
        if float(np.max(np.abs((1.0 - x) * Bx - d * x))) <= tol:
            return x
    raise NoConvergence(f"endemic fixed point did not reach tol={tol:g} in {max_iter} iterations")


def boundary_equilibria(system: MultiVirusSystem, tol: float = FIXED_POINT_TOL) -> list[EquilibriumDescriptor]:
    """All single-virus boundary equilibria of a tri-virus system.

    Returns one descriptor per virus k with s(B^k - D^k) > 0; viruses below
    threshold are omitted (their boundary equilibrium does not exist).
    """
    if system.m != 3:
        raise DimensionMismatch(f"boundary analysis requires m = 3, got m = {system.m}")
    if not all(system.irreducible_flags):
        raise NotIrreducible("boundary analysis requires every infection matrix irreducible")
    out = []
    for k in range(3):
        try:
            x_tilde = single_virus_endemic(system.D[k], system.B[k], tol)
        except SubThresholdSystem:
            continue
        x = np.zeros((3, system.n))
        x[k] = x_tilde
        point = SystemState.from_blocks(x)
        out.append(
            EquilibriumDescriptor(
                kind=KIND_BOUNDARY,
                base_point=point,
                residual=_residual_at(system, point),
                virus=k,
            )
        )
    return out


def line_point(z, beta1: float) -> SystemState:
    """The line member (beta1*z, (1-beta1)*z, 0) as a tri-virus state."""
    z = np.asarray(z, dtype=float).reshape(-1)
    if not 0.0 <= beta1 <= 1.0:
        raise ParameterOutOfRange(f"beta1 must lie in [0, 1], got {beta1}")
    if np.any(z <= 0.0) or np.any(z >= 1.0):
        raise ParameterOutOfRange("z must satisfy 0 << z << 1")
    zero = np.zeros_like(z)
    return SystemState.from_blocks([beta1 * z, (1.0 - beta1) * z, zero])


def construct_line_system(B1, B3, C, tol: float = FIXED_POINT_TOL) -> tuple[MultiVirusSystem, LineConstruction]:
    """Build a tri-virus system carrying a full line of coexistence equilibria.

    With all healing rates fixed to one, z is the endemic equilibrium of
    virus 0 (matrix B1); any nonnegative irreducible C fixing z (Cz = z,
    hence rho(C) = 1) induces B2 = (I-Z)^-1 C, and every point
    (b*z, (1-b)*z, 0), b in [0, 1], is then stationary regardless of B3.

    Raises:
        NotIrreducible: B1, B3 or C reducible.
        SubThresholdSystem: virus 0 below threshold (no z exists).
        EigvecMismatch: ||Cz - z||_inf > tol, or the constructed line fails
            its stationarity re-check.
    """
    B1 = np.asarray(B1, dtype=float)
    B3 = np.asarray(B3, dtype=float)
    C = np.asarray(C, dtype=float)
    for name, M in (("B1", B1), ("B3", B3), ("C", C)):
        if not is_irreducible(M):
            raise NotIrreducible(f"{name} must be irreducible")
    n = B1.shape[0]
    ones = np.ones(n)
    z = single_virus_endemic(ones, B1, tol=min(tol, 1e-12) * 1e-2)
    if float(np.max(np.abs(C @ z - z))) > tol:
        raise EigvecMismatch(f"C does not fix z within tol={tol:g}")
    B2 = C / (1.0 - z)[:, None]
    system = model.build_system([ones, ones, ones], [B1, B2, B3])
    construction = LineConstruction(z=z, C=C, B2=B2)
    # stationarity re-check of both active blocks at the ends and midpoint
    scale = 1.0 - z
    for beta1 in (0.0, 0.5, 1.0):
        r1 = float(np.max(np.abs((scale * (B1 @ (beta1 * z))) - beta1 * z)))
        r2 = float(np.max(np.abs(C @ ((1.0 - beta1) * z) - (1.0 - beta1) * z)))
        full = _residual_at(system, line_point(z, beta1))
        if max(r1, r2, full) > 10.0 * tol:
            raise EigvecMismatch("constructed line fails its stationarity re-check")
    return system, construction


def line_descriptor(system: MultiVirusSystem, z, tol: float = FIXED_POINT_TOL) -> EquilibriumDescriptor:
    """Descriptor for the line (b*z, (1-b)*z, 0), residual over 11 members."""
    z = np.asarray(z, dtype=float).reshape(-1)
    residual = max(
        _residual_at(system, line_point(z, b)) for b in np.linspace(0.0, 1.0, 11)
    )
    return EquilibriumDescriptor(
        kind=KIND_LINE,
        base_point=line_point(z, 0.5),
        residual=residual,
        line_z=z,
    )


_PLANE_SAMPLE_WEIGHTS = np.array(
    [
        (1.0, 0.0, 0.0),
        (0.0, 1.0, 0.0),
        (0.0, 0.0, 1.0),
        (0.5, 0.5, 0.0),
        (0.5, 0.0, 0.5),
        (0.0, 0.5, 0.5),
        (1 / 3, 1 / 3, 1 / 3),
        (0.6, 0.3, 0.1),
        (0.1, 0.6, 0.3),
        (0.3, 0.1, 0.6),
        (0.2, 0.5, 0.3),
    ]
)


def plane_descriptor(system: MultiVirusSystem, x_tilde, tol: float = FIXED_POINT_TOL) -> EquilibriumDescriptor:
    """Descriptor for the plane (a1*x~, a2*x~, a3*x~), sum(a) = 1."""
    x_tilde = np.asarray(x_tilde, dtype=float).reshape(-1)
    residual = 0.0
    for w in _PLANE_SAMPLE_WEIGHTS:
        point = SystemState.from_blocks([wk * x_tilde for wk in w])
        residual = max(residual, _residual_at(system, point))
    center = SystemState.from_blocks([x_tilde / 3.0] * 3)
    return EquilibriumDescriptor(
        kind=KIND_PLANE,
        base_point=center,
        residual=residual,
        plane_anchor=x_tilde,
        plane_alpha=np.full(3, 1.0 / 3.0),
    )


def plane_projection(x_tilde, state: SystemState, tol: float = 0.0) -> tuple[np.ndarray, float]:
    """Per-virus least-squares weights of a state against the plane anchor.

    alpha_k is the scalar fit of x^k onto x_tilde; the returned residual is
    max_k ||x^k - alpha_k x_tilde||_inf + |sum_k alpha_k - 1|. Residuals
    below tol (a reporting noise floor) are returned as exactly 0.0.
    """
    x_tilde = np.asarray(x_tilde, dtype=float).reshape(-1)
    denom = float(x_tilde @ x_tilde)
    alpha = state.x @ x_tilde / denom
    fit = float(np.max(np.abs(state.x - alpha[:, None] * x_tilde[None, :])))
    residual = fit + abs(float(alpha.sum()) - 1.0)
    if residual < tol:
        residual = 0.0
    return alpha, residual


def classify_equilibrium(
    system: MultiVirusSystem,
    point: SystemState,
    tol: float = NEWTON_TOL,
    zero_tol: float = ZERO_BLOCK_TOL,
) -> tuple[str, int | None]:
    """Classify an equilibrium point by which virus blocks are active.

    A block counts as active when any of its entries exceeds zero_tol.
    Returns (kind, virus) with virus set only for boundary points.

    Raises:
        NotAnEquilibrium: the vector-field residual at point exceeds tol.
    """
    residual = _residual_at(system, point)
    if residual > tol:
        raise NotAnEquilibrium(f"residual {residual:g} exceeds tol={tol:g}")
    active = [k for k in range(system.m) if np.any(np.abs(point.x[k]) > zero_tol)]
    if not active:
        return KIND_DFE, None
    if len(active) == 1:
        return KIND_BOUNDARY, active[0]
    return KIND_COEXISTENCE, None


def find_coexistence(
    system: MultiVirusSystem,
    start: SystemState,
    tol: float = NEWTON_TOL,
    max_iter: int = 50,
) -> EquilibriumDescriptor:
    """Damped Newton search for an equilibrium from an interior start.

    Each step solves J dx = -f and halves dx until the iterate stays in the
    invariant domain (at most 30 halvings). The converged fixed point is
    classified by its active blocks; despite the name, the search reports
    whatever it lands on (DFE and boundary points included).

    Raises:
        SingularJacobian: the Newton system could not be solved.
        NoConvergence: iteration cap or damping cap exceeded.
    """
    model._check_dims(system, start)
    x = start.x.copy()
    for _ in range(max_iter):
        state = SystemState.from_blocks(x)
        f = model.vector_field(system, state)
        if float(np.max(np.abs(f))) <= tol:
            kind, virus = classify_equilibrium(system, state, tol)
            return EquilibriumDescriptor(
                kind=kind,
                base_point=state,
                residual=float(np.max(np.abs(f))),
                virus=virus,
            )
        J = model.jacobian(system, state)
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian("Newton step unsolvable at the current iterate") from exc
        step = step.reshape(system.m, system.n)
        lam = 1.0
        for _halving in range(31):
            candidate = x + lam * step
            if in_candidate_domain(candidate):
                break
            lam *= 0.5
        else:
            raise NoConvergence("Newton damping could not keep the iterate in the domain")
        x = candidate
    raise NoConvergence(f"Newton did not converge within {max_iter} iterations")


def in_candidate_domain(x: np.ndarray, tol: float = model.DEFAULT_DOMAIN_TOL) -> bool:
    """Domain membership check on a raw (m, n) array."""
    return model.domain_excursion(x) <= tol


__all__ = [
    "EquilibriumDescriptor",
    "FIXED_POINT_TOL",
    "KIND_BOUNDARY",
    "KIND_COEXISTENCE",
    "KIND_DFE",
    "KIND_LINE",
    "KIND_PLANE",
    "LineConstruction",
    "NEWTON_TOL",
    "ZERO_BLOCK_TOL",
    "boundary_equilibria",
    "classify_equilibrium",
    "construct_line_system",
    "find_coexistence",
    "line_descriptor",
    "line_point",
    "plane_descriptor",
    "plane_projection",
    "single_virus_endemic",
]
