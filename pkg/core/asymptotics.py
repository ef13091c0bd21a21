"""
Closed-form limits of the self-consistency equations

Large-n errors and the multi-task gain, pure transfer from tasks with
unlimited data, and the equicorrelated many-task reduction with its two
learning stages.
"""

import math
from typing import List, Optional, Sequence

import numpy as np
from scipy import linalg

from config.enums import NUMERICAL_CONSTANTS
from config.logging_config import get_logger
from models.errors import InvalidSetupError, SolverConvergenceError
from models.spectrum_models import KernelSpectrum
from models.task_models import GainReport, ManyTaskPoint, SolverOptions, TaskSetup
from utils.validators import require_fractions, require_grid, require_noise, require_task_covariance
from .solver import damped_fixed_point, resolvent_trace, solve

logger = get_logger(__name__)


def g(spectrum: KernelSpectrum, h):
    """Single-task resolvent trace sum_i (1/lambda_i + h)^-1"""
    if np.any(np.asarray(h) < 0):
        raise InvalidSetupError(f"h must be non-negative, got {h}")
    return resolvent_trace(spectrum.eigenvalues, h)


def fit_alpha(spectrum: KernelSpectrum, h_lo: float, h_hi: float, points: int = 25) -> float:
    """Decay exponent alpha from the least-squares log-log slope of g on [h_lo, h_hi]"""
    if not 0 < h_lo < h_hi:
        raise InvalidSetupError(f"need 0 < h_lo < h_hi, got [{h_lo}, {h_hi}]")
    h = np.geomspace(h_lo, h_hi, points)
    slope = np.polyfit(np.log(h), np.log(g(spectrum, h)), 1)[0]
    return float(-slope)


def _precisions(D, noise, fractions):
    D = require_task_covariance(D)
    T = D.shape[0]
    noise = require_noise(noise, T)
    fractions = require_fractions(fractions, T)
    return D, noise, fractions / noise


def _scaled_eigensystem(D: np.ndarray, gamma: np.ndarray):
    root = np.sqrt(gamma)
    deltas, vectors = linalg.eigh(root[:, None] * D * root[None, :])
    return np.clip(deltas, 0.0, None), vectors


def asymptotic_errors(spectrum: KernelSpectrum, D, noise, fractions, n: float,
                      warn: bool = True) -> np.ndarray:
    """Large-n errors eps_tau = gamma_tau^-1 sum_a v_{a,tau}^2 delta_a g(n delta_a).

    Tasks without examples (gamma_tau = 0) use the equivalent form
    sum_a (D^1/2 u_a)_tau^2 g(n delta_a) over the eigensystem of D^1/2 Gamma D^1/2,
    which keeps their prior and transfer contributions.
    """
    D, noise, gamma = _precisions(D, noise, fractions)
    if n < 0:
        raise InvalidSetupError(f"n must be non-negative, got {n}")

    if np.all(gamma > 0):
        deltas, vectors = _scaled_eigensystem(D, gamma)
        eps = (vectors ** 2) @ (deltas * g(spectrum, n * deltas)) / gamma
    else:
        d, U = linalg.eigh(D)
        root_D = (U * np.sqrt(np.clip(d, 0.0, None))) @ U.T
        deltas, vectors = linalg.eigh(root_D @ np.diag(gamma) @ root_D)
        B = root_D @ vectors
        eps = (B ** 2) @ g(spectrum, n * np.clip(deltas, 0.0, None))

    if warn:
        ratio = NUMERICAL_CONSTANTS["ASYMPTOTIC_VALIDITY_RATIO"]
        outside = np.flatnonzero(eps > ratio * noise)
        if outside.size:
            logger.warning(
                f"Asymptotic form outside its range at n={n:g}: eps exceeds "
                f"{ratio:g} * noise for tasks {outside.tolist()}"
            )
    return eps


def multitask_gain(spectrum: KernelSpectrum, D, noise, fractions) -> GainReport:
    """Gain factors sum_a v_{a,tau}^2 (delta_a / gamma_tau)^(1 - alpha); NaN for unsampled tasks"""
    D, noise, gamma = _precisions(D, noise, fractions)
    deltas, vectors = _scaled_eigensystem(D, gamma)
    alpha = spectrum.alpha

    keep = deltas > NUMERICAL_CONSTANTS["DELTA_ZERO_TOL"] * max(float(np.max(deltas)), 1e-300)
    gains = np.full(gamma.size, np.nan)
    for tau in np.flatnonzero(gamma > 0):
        ratio = deltas[keep] / gamma[tau]
        gains[tau] = float(np.sum(vectors[tau, keep] ** 2 * ratio ** (1.0 - alpha)))

    return GainReport(gains=gains, gamma=gamma, deltas=deltas, vectors=vectors, alpha=alpha)


def power_law_errors(spectrum: KernelSpectrum, D, noise, fractions, n: float) -> np.ndarray:
    """Power-law form g(n gamma_tau) times the multi-task gain"""
    report = multitask_gain(spectrum, D, noise, fractions)
    return g(spectrum, n * report.gamma) * report.gains


def many_task_gain(rho: float, alpha: float) -> float:
    """Asymptotic many-task gain (1 - rho)^(1 - alpha)"""
    if not 0.0 <= rho <= 1.0:
        raise InvalidSetupError(f"rho must be in [0, 1], got {rho}")
    return (1.0 - rho) ** (1.0 - alpha)


def _conditional_covariance(D: np.ndarray, unknown: np.ndarray, known: np.ndarray) -> np.ndarray:
    """D_UU - D_UK D_KK^+ D_KU, the inverse of the (U, U) block of D^-1"""
    D_UU = D[np.ix_(unknown, unknown)]
    if known.size == 0:
        return D_UU
    D_UK = D[np.ix_(unknown, known)]
    S = D_UU - D_UK @ linalg.pinvh(D[np.ix_(known, known)]) @ D_UK.T
    return 0.5 * (S + S.T)


def pure_transfer_limit(spectrum: KernelSpectrum, D, observed_tasks: Sequence[int]) -> np.ndarray:
    """Lowest reachable errors of the unobserved tasks, in ascending task order"""
    D = require_task_covariance(D)
    T = D.shape[0]
    observed = np.unique(np.asarray(observed_tasks, dtype=int))
    if observed.size == 0 or observed.size >= T or observed.min() < 0 or observed.max() >= T:
        raise InvalidSetupError(f"observed tasks must be a non-empty strict subset of 0..{T - 1}")
    unobserved = np.setdiff1d(np.arange(T), observed)
    S = _conditional_covariance(D, unobserved, observed)
    return spectrum.trace * np.clip(np.diag(S), 0.0, None)


def pure_transfer_curve(spectrum: KernelSpectrum, D, noise, counts,
                        opts: Optional[SolverOptions] = None) -> np.ndarray:
    """Errors when tasks with infinite counts are known exactly.

    Finite-count tasks are solved with D replaced by their conditional
    covariance given the infinite-count tasks; those tasks get error zero.
    """
    opts = opts or SolverOptions.from_settings()
    D = require_task_covariance(D, opts.pd_tol)
    T = D.shape[0]
    noise = require_noise(noise, T)
    counts = np.asarray(counts, dtype=float).ravel()
    if counts.size != T or np.any(np.isnan(counts)) or np.any(counts < 0):
        raise InvalidSetupError(f"counts must be {T} non-negative values (inf allowed)")

    infinite = np.flatnonzero(np.isposinf(counts))
    finite = np.flatnonzero(~np.isposinf(counts))
    eps = np.zeros(T)
    if infinite.size == 0:
        return solve(spectrum, TaskSetup(D, noise, counts), opts).eps
    if finite.size == 0:
        return eps

    S = _conditional_covariance(D, finite, infinite)
    # tasks fully determined by the infinite-count ones keep error zero
    free = np.diag(S) > opts.pd_tol * float(np.max(np.diag(D)))
    if np.any(free):
        sub = finite[free]
        setup = TaskSetup(S[np.ix_(free, free)], noise[sub], counts[sub])
        eps[sub] = solve(spectrum, setup, opts).eps
    return eps


def g_T(spectrum: KernelSpectrum, h, rho: float, T: int):
    """Many-task function for equicorrelated D with unit diagonal"""
    if not 0.0 <= rho <= 1.0:
        raise InvalidSetupError(f"rho must be in [0, 1], got {rho}")
    if T < 1:
        raise InvalidSetupError(f"T must be a positive integer, got {T}")
    h = np.asarray(h, dtype=float)
    shared = rho + (1.0 - rho) / T
    return ((T - 1) / T) * (1.0 - rho) * g(spectrum, h * (1.0 - rho) / T) + shared * g(spectrum, h * shared)


def _single_task_point(spectrum: KernelSpectrum, n: float, noise: float, start: float,
                       opts: SolverOptions) -> float:
    """eps solving eps = g(n / (noise + eps))"""
    F = lambda x: np.atleast_1d(g(spectrum, n / (noise + x)))
    eps, _, _ = damped_fixed_point(F, np.array([start]), opts)
    return float(eps[0])


def many_task_curve(spectrum: KernelSpectrum, rho: float, T: int, noise: float, n_grid,
                    opts: Optional[SolverOptions] = None) -> List[ManyTaskPoint]:
    """Curve eps = g_T(n / (noise + eps), rho) with both learning-stage overlays.

    Stage 1 is (1 - rho) tr + rho eps~ with eps~ a single-task curve at noise
    (noise + (1 - rho) tr) / rho; stage 2 is (1 - rho) eps_bar with eps_bar a
    single-task curve at n / T examples and noise noise / (1 - rho).
    """
    opts = opts or SolverOptions.from_settings()
    if not noise > 0:
        raise InvalidSetupError(f"noise must be positive, got {noise}")
    grid = require_grid(n_grid)
    trace = spectrum.trace
    plateau = (1.0 - rho) * trace

    points = []
    warm = warm1 = warm2 = trace
    for n in grid:
        F = lambda x: np.atleast_1d(g_T(spectrum, n / (noise + x), rho, T))
        try:
            eps, iterations, _ = damped_fixed_point(F, np.array([warm]), opts)
        except SolverConvergenceError as e:
            raise e.at_n(float(n)) from e
        warm = float(eps[0])

        stage1 = stage2 = math.nan
        if rho > 0:
            warm1 = _single_task_point(spectrum, n, (noise + plateau) / rho, warm1, opts)
            stage1 = plateau + rho * warm1
        if rho < 1:
            warm2 = _single_task_point(spectrum, n / T, noise / (1.0 - rho), warm2, opts)
            stage2 = (1.0 - rho) * warm2

        points.append(ManyTaskPoint(float(n), warm, stage1, stage2, plateau, iterations))

    logger.debug(f"Many-task curve T={T}, rho={rho:g}: {len(points)} points")
    return points
