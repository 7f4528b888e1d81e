"""Adaptive integration of the multi-virus dynamics with domain monitoring.

The stepper is a Dormand-Prince 5(4) embedded pair (FSAL, PI step-size
controller) propagating the 5th-order solution. Every candidate step is
checked against the invariant domain: a coordinate outside
[-invariance_tol, 1 + invariance_tol] or a node sum above
1 + invariance_tol rejects the step and halves it. Tiny negative
coordinates (within invariance_tol) on accepted steps are clamped to zero
and the clamp magnitude is folded into the trajectory's worst-excursion
record, so integrator drift is bounded, visible, and never silently
masked.

Long near-equilibrium runs store at most max_samples samples, thinned
logarithmically in time (always keeping the first and last sample).

The deterministic initial-condition sampler draws, per node, m+1 uniform
shares from numpy's PCG64 generator and normalizes, so every node keeps a
strictly positive susceptible share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model
from .equilibria import (
    KIND_LINE,
    KIND_PLANE,
    EquilibriumDescriptor,
    plane_projection,
)
from .errors import (
    EmptyTrajectory,
    InitialStateOutsideDomain,
    ParameterOutOfRange,
    StepFailure,
)
from .model import MultiVirusSystem, SystemState

TIME_LIMIT = "TimeLimit"
CONVERGED = "Converged"
STEP_FAILURE = "StepFailure"

# Dormand-Prince 5(4) tableau; E = b5 - b4 gives the error estimate weights.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)


@dataclass
class IntegratorOptions:
    """Tuning knobs for integrate(); defaults suit the smooth polynomial
    dynamics of this model (no stiffness at these parameter scales)."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float = 1.0
    invariance_tol: float = model.DEFAULT_DOMAIN_TOL
    max_samples: int = 5000
    first_step: float | None = None
    steady_state_tol: float | None = None  # early stop when ||dx/dt||_inf drops below


@dataclass(frozen=True)
class Trajectory:
    """Stored samples of one integration run.

    times is strictly increasing; states has shape (len(times), m, n).
    domain_violation_max is the worst excursion beyond the invariant
    domain observed on accepted steps (clamps included).
    """

    times: np.ndarray
    states: np.ndarray
    domain_violation_max: float
    terminated_reason: str

    def __len__(self) -> int:
        return self.times.size

    def state_at(self, i: int) -> SystemState:
        return SystemState.from_blocks(self.states[i], t=float(self.times[i]))

    def final_state(self) -> SystemState:
        return self.state_at(len(self) - 1)


@dataclass(frozen=True)
class ConvergenceReport:
    """Distance-to-target diagnostics for a trajectory.

    fitted_amplitude/fitted_rate are the log-linear fit d(t) ~ a e^(-b t)
    over the trailing tail_fraction of samples; a degenerate fit (distance
    already at the noise floor) reports amplitude 0 and rate +inf.
    line_parameter is the best line coordinate at the final sample when
    the target is a line, else None.
    """

    target: EquilibriumDescriptor
    final_distance: float
    fitted_rate: float
    fitted_amplitude: float
    converged: bool
    tolerance: float
    line_parameter: float | None = None


def random_initial_condition(n: int, m: int, seed: int) -> SystemState:
    """Deterministic random interior state: per node, m+1 uniform(0,1)
    shares normalized to sum one; the withheld share keeps sum_k x_i^k < 1.

    Uses numpy's PCG64 (permuted congruential, 64-bit) generator, so a
    fixed seed reproduces bit-identical states across runs and platforms.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    p = rng.random((n, m + 1))
    x = (p[:, :m] / p.sum(axis=1, keepdims=True)).T
    return SystemState.from_blocks(x)


def integrate(
    system: MultiVirusSystem,
    x0: SystemState,
    t_end: float,
    opts: IntegratorOptions | None = None,
) -> Trajectory:
    """Integrate the stacked dynamics from x0 over [x0.t, x0.t + t_end].

    Raises:
        InitialStateOutsideDomain: x0 violates the domain beyond
            invariance_tol.
        ParameterOutOfRange: t_end <= 0.
        StepFailure: the minimum step was reached without acceptance; the
            partial trajectory is attached to the exception.
    """
    opts = opts or IntegratorOptions()
    if t_end <= 0.0:
        raise ParameterOutOfRange(f"t_end must be positive, got {t_end}")
    if not model.in_domain(x0, opts.invariance_tol):
        raise InitialStateOutsideDomain("initial state outside the invariant domain")
    model._check_dims(system, x0)

    m, n = system.m, system.n
    B, D = system.B, system.D

    def rhs(flat: np.ndarray) -> np.ndarray:
        xs = flat.reshape(m, n)
        s = 1.0 - xs.sum(axis=0)
        return (np.einsum("kij,kj->ki", B, xs) * s - D * xs).ravel()

    t0 = float(x0.t)
    t_final = t0 + float(t_end)
    x = x0.x.reshape(-1).copy()
    worst = model.domain_excursion(x0.x)

    K = np.empty((7, m * n))
    K[0] = rhs(x)

    h = _initial_step(x, K[0], opts, t_end)
    h_min = max(1e-14, 1e-14 * abs(t_final))
    err_prev = 1.0  # PI controller memory
    times = [t0]
    states = [x.copy()]
    t = t0
    reason = TIME_LIMIT
    inv_tol = opts.invariance_tol

    while t < t_final:
        remaining = t_final - t
        if remaining <= h_min:
            break
        h = min(h, remaining, opts.max_step)
        if h < h_min:
            raise StepFailure(
                f"step size {h:g} below minimum at t={t:g}",
                trajectory=_pack(times, states, worst, STEP_FAILURE, m, n),
            )
        for i in range(1, 7):
            K[i] = rhs(x + h * (_DP_A[i] @ K[:i]))
        x_new = x + h * (_DP_B5 @ K)

        lo = float(x_new.min())
        hi = float(x_new.max())
        sum_hi = float(x_new.reshape(m, n).sum(axis=0).max())
        excursion = max(0.0, -lo, hi - 1.0, sum_hi - 1.0)
        if excursion > inv_tol:
            h *= 0.5
            continue

        err_norm = h * float(np.max(np.abs(_DP_E @ K)))
        err_norm /= opts.abs_tol + opts.rel_tol * float(np.max(np.abs(x)))
        if err_norm > 1.0:
            h *= min(1.0, max(0.1, 0.9 * err_norm ** (-0.2)))
            continue

        # accepted: record excursion, clamp tiny negatives, advance
        worst = max(worst, excursion)
        clamped = lo < 0.0
        if clamped:
            np.clip(x_new, 0.0, None, out=x_new)
        t += h
        x = x_new
        times.append(t)
        states.append(x)
        if clamped:
            K[0] = rhs(x)
        else:
            K[0] = K[6]  # FSAL: last stage is f at the accepted state

        if opts.steady_state_tol is not None and float(np.max(np.abs(K[0]))) <= opts.steady_state_tol:
            reason = CONVERGED
            break

        e_clip = max(err_norm, 1e-10)
        factor = 0.9 * e_clip ** (-0.14) * err_prev ** 0.08  # PI: beta1=0.7/5, beta2=0.4/5
        h *= min(5.0, max(0.2, factor))
        err_prev = e_clip

    return _pack(times, states, worst, reason, m, n, opts.max_samples)


def _initial_step(x: np.ndarray, f: np.ndarray, opts: IntegratorOptions, t_end: float) -> float:
    if opts.first_step is not None:
        return min(opts.first_step, opts.max_step)
    d0 = float(np.max(np.abs(x)))
    d1 = float(np.max(np.abs(f)))
    if d1 < 1e-12:
        guess = 1e-3 * t_end
    else:
        guess = 0.01 * max(d0, 0.1) / d1
    return min(guess, opts.max_step, t_end)


def _pack(times, states, worst, reason, m: int, n: int, max_samples: int | None = None) -> Trajectory:
    times = np.asarray(times)
    states = np.asarray(states).reshape(len(times), m, n)
    if max_samples is not None and len(times) > max_samples:
        keep = _log_thin_indices(times, max_samples)
        times = times[keep]
        states = states[keep]
    times.setflags(write=False)
    states.setflags(write=False)
    return Trajectory(
        times=times,
        states=states,
        domain_violation_max=float(worst),
        terminated_reason=reason,
    )


def _log_thin_indices(times: np.ndarray, max_samples: int) -> np.ndarray:
    """Indices of a logarithmically spaced subsample, keeping ends."""
    positive = times[times > 0.0]
    if positive.size == 0:
        return np.linspace(0, times.size - 1, max_samples).astype(int)
    lo, hi = float(positive[0]), float(times[-1])
    if hi <= lo:
        targets = np.full(max_samples - 2, hi)
    else:
        targets = np.geomspace(lo, hi, max_samples - 2)
    idx = np.searchsorted(times, targets)
    idx = np.clip(idx, 0, times.size - 1)
    keep = np.unique(np.concatenate([[0], idx, [times.size - 1]]))
    return keep


def aggregate_single_virus(system: MultiVirusSystem) -> MultiVirusSystem:
    """The one-virus system (D^1, B^1) whose state matches sum_k x^k when
    all viruses are identical."""
    return model.build_system([system.D[0]], [system.B[0]])


def detect_convergence(
    traj: Trajectory,
    target: EquilibriumDescriptor,
    tol: float,
    tail_fraction: float = 0.5,
) -> ConvergenceReport:
    """Distance of a trajectory to a target equilibrium (set) over time.

    Point targets use the stacked max-norm; line targets minimize over the
    line coordinate by golden-section search (vectorized over samples,
    coordinate tolerance 1e-12); plane targets use the per-virus
    proportionality residual. The decay constants come from a log-linear
    fit over the trailing tail_fraction of samples.

    Raises:
        EmptyTrajectory: the trajectory holds no samples.
        ParameterOutOfRange: tail_fraction outside (0, 1].
    """
    if len(traj) == 0:
        raise EmptyTrajectory("cannot assess convergence of an empty trajectory")
    if not 0.0 < tail_fraction <= 1.0:
        raise ParameterOutOfRange(f"tail_fraction must be in (0, 1], got {tail_fraction}")

    line_parameter = None
    if target.kind == KIND_LINE:
        dist, betas = _line_distances(traj.states, target.line_z)
        line_parameter = float(betas[-1])
    elif target.kind == KIND_PLANE:
        dist = np.array(
            [
                plane_projection(target.plane_anchor, traj.state_at(i))[1]
                for i in range(len(traj))
            ]
        )
    else:
        delta = traj.states - target.base_point.x[None, :, :]
        dist = np.max(np.abs(delta), axis=(1, 2))

    final_distance = float(dist[-1])
    start = int(math.floor((1.0 - tail_fraction) * len(traj)))
    t_tail = traj.times[start:]
    d_tail = dist[start:]
    mask = d_tail > 1e-300
    if mask.sum() >= 2 and float(d_tail[mask].max()) > 1e-15:
        slope, intercept = np.polyfit(t_tail[mask], np.log(d_tail[mask]), 1)
        fitted_rate = -float(slope)
        fitted_amplitude = float(np.exp(intercept))
    else:
        fitted_rate = math.inf
        fitted_amplitude = 0.0
    return ConvergenceReport(
        target=target,
        final_distance=final_distance,
        fitted_rate=fitted_rate,
        fitted_amplitude=fitted_amplitude,
        converged=final_distance <= tol,
        tolerance=tol,
        line_parameter=line_parameter,
    )


def _line_distances(states: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample max-norm distance to the line (b*z, (1-b)*z, 0), b in [0,1].

    Golden-section search on b, run simultaneously for all samples; the
    objective is unimodal in b for this family.
    """
    S = states.shape[0]

    def objective(beta: np.ndarray) -> np.ndarray:
        d1 = np.max(np.abs(states[:, 0, :] - beta[:, None] * z[None, :]), axis=1)
        d2 = np.max(np.abs(states[:, 1, :] - (1.0 - beta)[:, None] * z[None, :]), axis=1)
        rest = np.max(np.abs(states[:, 2:, :]), axis=(1, 2)) if states.shape[1] > 2 else 0.0
        return np.maximum(np.maximum(d1, d2), rest)

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a = np.zeros(S)
    b = np.ones(S)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = objective(c)
    fd = objective(d)
    while float(np.max(b - a)) > 1e-12:
        take_left = fc < fd
        b = np.where(take_left, d, b)
        a = np.where(take_left, a, c)
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc = objective(c)
        fd = objective(d)
    beta = 0.5 * (a + b)
    return objective(beta), beta


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Write samples as CSV: header t,x1_1..x1_n,...,xm_1..xm_n, one row per
    sample, full double precision (17 significant digits)."""
    S, m, n = traj.states.shape
    header = ["t"] + [f"x{k + 1}_{i + 1}" for k in range(m) for i in range(n)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for idx in range(S):
            row = [traj.times[idx], *traj.states[idx].reshape(-1)]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


__all__ = [
    "CONVERGED",
    "ConvergenceReport",
    "IntegratorOptions",
    "STEP_FAILURE",
    "TIME_LIMIT",
    "Trajectory",
    "aggregate_single_virus",
    "detect_convergence",
    "integrate",
    "random_initial_condition",
    "write_trajectory_csv",
]
