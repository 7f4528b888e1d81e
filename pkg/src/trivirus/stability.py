"""Stability classifiers for the competitive tri-virus SIS model.

Four families of verdicts, each reduced to nonnegative/Metzler spectral
conditions:

  * disease-free equilibrium: signs of the per-virus abscissas s(B^k - D^k);
  * boundary equilibria: the two cross-virus spectral radii
    rho((I - X~^k)(D^l)^-1 B^l) against 1;
  * constructed lines of coexistence equilibria: the sign of
    s(-I + (I - Z)B^3);
  * planes of coexistence equilibria (identical viruses): a diagonal
    Lyapunov certificate (x~, u~, P, Q_bar, lambda2) whose identities are
    verified numerically before it is returned.

Spectral verdicts within +-tol of their threshold report "Marginal" and
never a stability claim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .equilibria import LineConstruction, line_point, single_virus_endemic
from .errors import (
    CertificateInvalid,
    CertificateMismatch,
    ConstructionMismatch,
    DimensionMismatch,
    NotIrreducible,
)
from .model import MultiVirusSystem
from .simulate import Trajectory
from .spectral import perron, spectral_abscissa_metzler, symmetric_eigenvalues

VERDICT_TOL = 1e-9

GES = "GES"
ASYMPTOTICALLY_STABLE_UNIQUE = "AsymptoticallyStableUnique"
NOT_UNIQUE = "NotUnique"
LOCALLY_EXPONENTIALLY_STABLE = "LocallyExponentiallyStable"
LOCALLY_EXPONENTIALLY_ATTRACTIVE = "LocallyExponentiallyAttractive"
UNSTABLE = "Unstable"
MARGINAL = "Marginal"

_SOLVER_TOL = 1e-13


@dataclass(frozen=True)
class DfeReport:
    """Per-virus abscissas s(B^k - D^k) and the disease-free verdict.

    All abscissas < -tol: globally exponentially stable. None above +tol
    but some within the band: asymptotically stable and the unique
    equilibrium. Any abscissa > tol: other equilibria exist.
    """

    abscissas: np.ndarray
    verdict: str
    tolerance: float


@dataclass(frozen=True)
class BoundaryVerdict:
    """Local stability of the boundary equilibrium where virus k survives.

    rho_values maps each competitor index l != k to
    rho((I - X~^k)(D^l)^-1 B^l). Stable iff both radii < 1 - tol; unstable
    iff either > 1 + tol; Marginal otherwise.
    """

    virus: int
    rho_values: tuple[tuple[int, float], ...]
    verdict: str
    x_tilde: np.ndarray
    tolerance: float


@dataclass(frozen=True)
class LineVerdict:
    """Attractivity verdict for a constructed line of equilibria.

    s_value = s(-I + (I - Z)B^3); rho_value = s_value + 1 is the radius
    form rho((I - Z)B^3) valid under unit healing rates.
    """

    verdict: str
    s_value: float
    rho_value: float
    z: np.ndarray
    tolerance: float


@dataclass(frozen=True)
class LyapunovCertificate:
    """Diagonal Lyapunov data certifying exponential collapse onto the plane.

    Q = D - (I - X~)B is a singular irreducible M-matrix with right null
    vector x_tilde and left null vector u_tilde (normalized u~.x~ = 1);
    P = diag(u~_i / x~_i) makes Q_bar = PQ + Q^T P positive semidefinite of
    rank n-1 with null vector x_tilde. lambda2 is the smallest strictly
    positive eigenvalue of Q_bar, lambda_bar = lambda2 / p_max the decay
    rate entering the bound Vdot <= -lambda_bar V + a_bar e^(-b t).
    """

    x_tilde: np.ndarray
    u_tilde: np.ndarray
    p_diag: np.ndarray  # diagonal of P
    Q: np.ndarray
    Q_bar: np.ndarray
    lambda2: float
    lambda_bar: float
    p_max: float
    p_min: float

    @property
    def n(self) -> int:
        return self.x_tilde.size


@dataclass(frozen=True)
class LyapunovTrace:
    """Sampled Lyapunov function V along a trajectory with bound flags.

    Entries cover the interior samples (central differencing needs both
    neighbors). fitted_amplitude/fitted_rate are the (a, b) of the
    aggregate-decay envelope ||x~ - z(t)|| ~ a e^(-b t); a_bar is the
    slackened amplitude used in the bound.
    """

    t: np.ndarray
    V: np.ndarray
    bound_ok: np.ndarray
    fitted_amplitude: float
    fitted_rate: float
    a_bar: float


def dfe_report(system: MultiVirusSystem, tol: float = VERDICT_TOL) -> DfeReport:
    """Stability report for the disease-free equilibrium."""
    abscissas = np.array(
        [
            spectral_abscissa_metzler(system.B[k] - np.diag(system.D[k]), _SOLVER_TOL)
            for k in range(system.m)
        ]
    )
    if np.any(abscissas > tol):
        verdict = NOT_UNIQUE
    elif np.all(abscissas < -tol):
        verdict = GES
    else:
        verdict = ASYMPTOTICALLY_STABLE_UNIQUE
    return DfeReport(abscissas=abscissas, verdict=verdict, tolerance=tol)


def boundary_stability(system: MultiVirusSystem, k: int, tol: float = VERDICT_TOL) -> BoundaryVerdict:
    """Local exponential stability of the boundary equilibrium of virus k.

    Requires m = 3, irreducible infection matrices, and virus k above
    threshold. The equilibrium is stable iff both cross radii
    rho((I - X~^k)(D^l)^-1 B^l), l != k, are below one.

    Raises:
        SubThresholdSystem: virus k has no endemic equilibrium.
        NotIrreducible: some infection matrix is reducible.
    """
    if system.m != 3:
        raise DimensionMismatch(f"boundary stability requires m = 3, got m = {system.m}")
    if not all(system.irreducible_flags):
        raise NotIrreducible("boundary stability requires every infection matrix irreducible")
    x_tilde = single_virus_endemic(system.D[k], system.B[k], _SOLVER_TOL)
    rho_values = []
    for l in range(3):
        if l == k:
            continue
        M = ((1.0 - x_tilde) / system.D[l])[:, None] * system.B[l]
        rho_values.append((l, perron(M, _SOLVER_TOL).rho))
    rhos = [r for _, r in rho_values]
    if all(r < 1.0 - tol for r in rhos):
        verdict = LOCALLY_EXPONENTIALLY_STABLE
    elif any(r > 1.0 + tol for r in rhos):
        verdict = UNSTABLE
    else:
        verdict = MARGINAL
    return BoundaryVerdict(
        virus=k,
        rho_values=tuple(rho_values),
        verdict=verdict,
        x_tilde=x_tilde,
        tolerance=tol,
    )


def line_stability(
    system: MultiVirusSystem,
    construction: LineConstruction,
    tol: float = VERDICT_TOL,
) -> LineVerdict:
    """Attractivity of the constructed line (b*z, (1-b)*z, 0).

    The verdict is the sign of s(-I + (I - Z)B^3) with a Marginal band of
    +-tol. The Jacobian structure the construction promises is re-checked
    at b in {0, 0.5, 1}: after the sign-flip similarity on the virus-1
    block, the leading 2n x 2n block must be Metzler with abscissa zero.

    Raises:
        ConstructionMismatch: the system does not match the construction
            (healing rates not one, B^2 differs from (I-Z)^-1 C), or the
            promised Jacobian structure fails.
    """
    if system.m != 3:
        raise DimensionMismatch(f"line stability requires m = 3, got m = {system.m}")
    z = construction.z
    n = z.size
    if system.n != n:
        raise ConstructionMismatch("construction and system node counts differ")
    if float(np.max(np.abs(system.D - 1.0))) > 1e-12:
        raise ConstructionMismatch("line construction assumes unit healing rates")
    if float(np.max(np.abs(system.B[1] - construction.B2))) > 1e-9:
        raise ConstructionMismatch("system B^2 does not match the construction")
    M3 = -np.eye(n) + (1.0 - z)[:, None] * system.B[2]
    s_value = spectral_abscissa_metzler(M3, _SOLVER_TOL)
    flip = np.concatenate([np.ones(n), -np.ones(n)])
    for beta1 in (0.0, 0.5, 1.0):
        J = model.jacobian(system, line_point(z, beta1))
        J_bar = J[: 2 * n, : 2 * n]
        T = flip[:, None] * J_bar * flip[None, :]
        off = T - np.diag(np.diag(T))
        if float(np.min(off, initial=0.0)) < -1e-12:
            raise ConstructionMismatch("transformed line Jacobian block is not Metzler")
        if abs(spectral_abscissa_metzler(T, _SOLVER_TOL)) > 1e-7:
            raise ConstructionMismatch("transformed line Jacobian abscissa is not zero")
    if s_value < -tol:
        verdict = LOCALLY_EXPONENTIALLY_ATTRACTIVE
    elif s_value > tol:
        verdict = UNSTABLE
    else:
        verdict = MARGINAL
    return LineVerdict(
        verdict=verdict,
        s_value=s_value,
        rho_value=1.0 + s_value,
        z=z,
        tolerance=tol,
    )


def check_identical_viruses(system: MultiVirusSystem, tol: float = 1e-12) -> bool:
    """True iff all viruses share healing rates and infection matrices within tol."""
    d_spread = float(np.max(np.abs(system.D - system.D[0])))
    b_spread = float(np.max(np.abs(system.B - system.B[0])))
    return max(d_spread, b_spread) <= tol


def lyapunov_certificate(d, B, tol: float = VERDICT_TOL) -> LyapunovCertificate:
    """Build and verify the diagonal Lyapunov certificate for one virus.

    x_tilde solves the endemic equation of (D, B); u_tilde is the left
    Perron vector of the radius-one nonnegative matrix (I - X~) B D^-1
    (the left null vector of Q), normalized u~.x~ = 1. All defining
    identities (null vectors, normalization, PSD rank n-1 spectrum of
    Q_bar) are checked at tolerance tol before the certificate is
    returned.

    Raises:
        SubThresholdSystem / NotIrreducible: surfaced from the endemic solve.
        CertificateInvalid: a verified identity fails beyond tol.
    """
    d = np.asarray(d, dtype=float).reshape(-1)
    B = np.asarray(B, dtype=float)
    x_tilde = single_virus_endemic(d, B, _SOLVER_TOL)
    n = x_tilde.size
    N = (1.0 - x_tilde)[:, None] * B / d[None, :]
    triple = perron(N, _SOLVER_TOL)
    u_tilde = triple.left / float(triple.left @ x_tilde)
    p_diag = u_tilde / x_tilde
    Q = np.diag(d) - (1.0 - x_tilde)[:, None] * B
    Q_bar = p_diag[:, None] * Q + (p_diag[:, None] * Q).T
    eig_tol = 1e-11 * max(1.0, float(np.linalg.norm(Q_bar)))
    eigs = symmetric_eigenvalues(Q_bar, eig_tol)
    checks = {
        "Q x~": float(np.max(np.abs(Q @ x_tilde))),
        "u~ Q": float(np.max(np.abs(u_tilde @ Q))),
        "u~.x~": abs(float(u_tilde @ x_tilde) - 1.0),
        "min eig": abs(float(eigs[0])),
        "Q_bar x~": float(np.max(np.abs(Q_bar @ x_tilde))) / n,
        "rho(N)": abs(triple.rho - 1.0),
    }
    worst = max(checks.values())
    if worst > tol:
        detail = ", ".join(f"{k}={v:.3e}" for k, v in checks.items())
        raise CertificateInvalid(f"certificate identity beyond tol={tol:g}: {detail}")
    if eigs[1] < tol:
        raise CertificateInvalid(
            f"Q_bar second eigenvalue {eigs[1]:.3e} not separated from zero (rank must be n-1)"
        )
    p_max = float(np.max(p_diag))
    p_min = float(np.min(p_diag))
    lambda2 = float(eigs[1])
    return LyapunovCertificate(
        x_tilde=x_tilde,
        u_tilde=u_tilde,
        p_diag=p_diag,
        Q=Q,
        Q_bar=Q_bar,
        lambda2=lambda2,
        lambda_bar=lambda2 / p_max,
        p_max=p_max,
        p_min=p_min,
    )


def lyapunov_trace(cert: LyapunovCertificate, trajectory: Trajectory, k: int) -> LyapunovTrace:
    """Evaluate V = zeta^T P zeta for virus k along a trajectory and check
    the decay bound Vdot <= -lambda_bar V + a_bar e^(-b t).

    zeta = R x^k with the oblique projection R = I - x~ u~^T, so V vanishes
    exactly on the plane. The envelope (a, b) is fitted to the measured
    aggregate decay ||x~ - sum_l x^l(t)||_2 after discarding the first 5%
    of samples; a_bar = 10 * a * p_max gives the bound slack. Vdot comes
    from central differences, so flags exist for interior samples only and
    a 1e-12 absolute floor absorbs differencing roundoff near V = 0.

    Raises:
        CertificateMismatch: trajectory dimensions do not match the
            certificate or k is out of range.
    """
    states = trajectory.states
    if states.ndim != 3 or states.shape[2] != cert.n:
        raise CertificateMismatch("trajectory node count does not match the certificate")
    if not 0 <= k < states.shape[1]:
        raise CertificateMismatch(f"virus index {k} out of range for m = {states.shape[1]}")
    if states.shape[0] < 3:
        raise CertificateMismatch("need at least 3 samples for central differencing")
    times = trajectory.times
    R = np.eye(cert.n) - np.outer(cert.x_tilde, cert.u_tilde)
    zeta = states[:, k, :] @ R.T
    V = np.einsum("si,i,si->s", zeta, cert.p_diag, zeta)

    agg = states.sum(axis=1)
    dist = np.linalg.norm(agg - cert.x_tilde[None, :], axis=1)
    skip = max(1, int(0.05 * len(times)))
    # the decay bottoms out at the endemic solver's accuracy; fitting the
    # plateau would flatten the envelope, so only clearly decaying samples count
    floor = max(1e-12, 10.0 * float(dist.min()))
    mask = dist[skip:] > floor
    if mask.sum() >= 2:
        tt = times[skip:][mask]
        dd = np.log(dist[skip:][mask])
        slope, _ = np.polyfit(tt, dd, 1)
        b_fit = -float(slope)
        # the envelope must majorize the measured decay, so the amplitude is
        # the smallest a with a*e^(-b t) >= dist(t) over the fitted window
        a_fit = float(np.exp(np.max(dd + b_fit * tt)))
    else:
        b_fit = 0.0
        a_fit = 0.0
    a_bar = 10.0 * a_fit * cert.p_max

    V_dot = (V[2:] - V[:-2]) / (times[2:] - times[:-2])
    t_mid = times[1:-1]
    rhs = -cert.lambda_bar * V[1:-1] + a_bar * np.exp(-b_fit * t_mid)
    ok = V_dot <= rhs + 1e-12
    return LyapunovTrace(
        t=t_mid,
        V=V[1:-1],
        bound_ok=ok,
        fitted_amplitude=a_fit,
        fitted_rate=b_fit,
        a_bar=a_bar,
    )


__all__ = [
    "ASYMPTOTICALLY_STABLE_UNIQUE",
    "BoundaryVerdict",
    "DfeReport",
    "GES",
    "LOCALLY_EXPONENTIALLY_ATTRACTIVE",
    "LOCALLY_EXPONENTIALLY_STABLE",
    "LineVerdict",
    "LyapunovCertificate",
    "LyapunovTrace",
    "MARGINAL",
    "NOT_UNIQUE",
    "UNSTABLE",
    "VERDICT_TOL",
    "boundary_stability",
    "check_identical_viruses",
    "dfe_report",
    "line_stability",
    "lyapunov_certificate",
    "lyapunov_trace",
]
