"""
Self-consistent prediction of multi-task Bayes errors

For each task tau the average Bayes error solves

    eps_tau = sum_i [ (lambda_i^-1 D^-1 + diag(n / (sigma^2 + eps)))^-1 ]_{tau tau}

The per-eigenvalue T x T inverses share one structure: with D = L L^T and
L^T W L = Q diag(r) Q^T the right-hand side is sum_a (LQ)^2_{tau a} g(r_a),
g(h) = sum_i lambda_i / (1 + lambda_i h). Evaluations then cost one small
eigendecomposition plus M T scalar terms, all of them positive.
"""

import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.sparse.csgraph import connected_components

from config.enums import NUMERICAL_CONSTANTS
from config.logging_config import get_logger, log_solver_run
from models.errors import InvalidSetupError, SingularTaskCovarianceError, SolverConvergenceError
from models.spectrum_models import KernelSpectrum
from models.task_models import BayesErrors, SolverOptions, TaskSetup
from utils.validators import (
    is_positive_definite,
    require_fractions,
    require_grid,
    require_task_covariance,
)

logger = get_logger(__name__)


def resolvent_trace(eigenvalues: np.ndarray, h) -> np.ndarray:
    """g(h) = sum_i lambda_i / (1 + lambda_i h), vectorised over h"""
    h = np.asarray(h, dtype=float)
    flat = np.atleast_1d(h).ravel()
    values = np.asarray(eigenvalues, dtype=float)
    out = np.sum(values[:, None] / (1.0 + values[:, None] * flat[None, :]), axis=0)
    return out.reshape(h.shape) if h.ndim else out[0]


def prior_error(spectrum: KernelSpectrum, D) -> np.ndarray:
    """Errors before any data: D_tau,tau tr(Lambda)"""
    D = require_task_covariance(D)
    return np.diag(D) * spectrum.trace


@dataclass
class TaskPooling:
    """Groups of fully correlated tasks merged into one effective task each.

    Member m of the group represented by g has f_m = c_m f_g with
    c_m = D_gm / D_gg, so its errors are eps_m = c_m^2 eps_g.
    """
    group_of: np.ndarray       # group index per task
    representatives: np.ndarray  # task index per group
    coef2: np.ndarray          # c_m^2 per task
    reduced_D: np.ndarray

    @property
    def is_trivial(self) -> bool:
        return self.representatives.size == self.group_of.size

    def groups(self) -> List[List[int]]:
        return [np.flatnonzero(self.group_of == g).tolist() for g in range(self.representatives.size)]

    def expand(self, eps_reduced: np.ndarray) -> np.ndarray:
        return self.coef2 * eps_reduced[self.group_of]


def pool_tasks(D: np.ndarray, pd_tol: float) -> TaskPooling:
    """Merge fully correlated task groups when D is singular"""
    T = D.shape[0]
    if is_positive_definite(D, pd_tol):
        return TaskPooling(np.arange(T), np.arange(T), np.ones(T), D)

    scale = np.sqrt(np.diag(D))
    corr = D / np.outer(scale, scale)
    linked = np.abs(corr) >= 1.0 - pd_tol
    n_groups, labels = connected_components(linked.astype(float), directed=False)

    # order groups by their lowest task index
    representatives = np.array([np.flatnonzero(labels == g)[0] for g in range(n_groups)])
    order = np.argsort(representatives)
    representatives = representatives[order]
    group_of = np.argsort(order)[labels]

    rep_of_task = representatives[group_of]
    coef = D[rep_of_task, np.arange(T)] / D[rep_of_task, rep_of_task]
    reduced_D = D[np.ix_(representatives, representatives)]

    if not is_positive_definite(reduced_D, pd_tol):
        min_eigenvalue = float(linalg.eigvalsh(reduced_D)[0])
        raise SingularTaskCovarianceError(
            "D is singular but not through fully correlated task pairs; cannot pool",
            min_eigenvalue=min_eigenvalue,
        )

    logger.debug(f"Pooled {T} tasks into {n_groups} groups")
    return TaskPooling(group_of, representatives, coef ** 2, reduced_D)


def _reduced_rhs(eigenvalues: np.ndarray, pooling: TaskPooling, noise: np.ndarray,
                 counts: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Right-hand side map on the pooled task variables"""
    L = linalg.cholesky(pooling.reduced_D, lower=True)
    group_of = pooling.group_of
    coef2 = pooling.coef2
    n_groups = pooling.representatives.size
    data_weight = coef2 * counts

    def rhs(eps: np.ndarray) -> np.ndarray:
        member = data_weight / (noise + coef2 * eps[group_of])
        w = np.bincount(group_of, weights=member, minlength=n_groups)
        r, Q = linalg.eigh((L.T * w) @ L)
        LQ = L @ Q
        return (LQ ** 2) @ resolvent_trace(eigenvalues, np.clip(r, 0.0, None))

    return rhs


def rhs(spectrum: KernelSpectrum, setup: TaskSetup, eps) -> np.ndarray:
    """Right-hand side of the self-consistency equations at eps"""
    eps = np.asarray(eps, dtype=float).ravel()
    if eps.size != setup.T or np.any(eps < 0):
        raise InvalidSetupError(f"eps must be {setup.T} non-negative values, got {eps.tolist()}")
    if not is_positive_definite(setup.D):
        raise SingularTaskCovarianceError(
            "D is numerically singular; use solve(), which pools fully correlated tasks",
            min_eigenvalue=float(linalg.eigvalsh(setup.D)[0]),
        )
    T = setup.T
    identity = TaskPooling(np.arange(T), np.arange(T), np.ones(T), setup.D)
    return _reduced_rhs(spectrum.eigenvalues, identity, setup.noise, setup.counts)(eps)


def damped_fixed_point(F: Callable[[np.ndarray], np.ndarray], x0: np.ndarray,
                       opts: SolverOptions) -> Tuple[np.ndarray, int, float]:
    """Iterate x <- (1 - beta) x + beta F(x), halving beta when the residual grows.

    Returns (x, iterations, residual) with residual = max |x - F(x)| / (x + floor).
    """
    def residual_of(x, fx):
        return float(np.max(np.abs(x - fx) / (np.abs(x) + opts.eps_floor)))

    x = np.asarray(x0, dtype=float).copy()
    fx = F(x)
    residual = residual_of(x, fx)
    beta = opts.beta_init
    iterations = 0

    while residual >= opts.tol:
        if iterations >= opts.max_iter:
            raise SolverConvergenceError(
                f"fixed point not reached after {iterations} iterations (residual {residual:.3e})",
                residual=residual,
                iterations=iterations,
            )
        x = (1.0 - beta) * x + beta * fx
        fx = F(x)
        new_residual = residual_of(x, fx)
        if new_residual > residual and beta > opts.beta_min:
            beta = max(0.5 * beta, opts.beta_min)
        residual = new_residual
        iterations += 1

    return x, iterations, residual


def solve(spectrum: KernelSpectrum, setup: TaskSetup, opts: Optional[SolverOptions] = None,
          start: Optional[Sequence[float]] = None, start_label: Optional[str] = None) -> BayesErrors:
    """Solve the self-consistency equations for one task setup"""
    opts = opts or SolverOptions.from_settings()
    started = time.perf_counter()

    prior = prior_error(spectrum, setup.D)
    pooling = pool_tasks(setup.D, opts.pd_tol)

    if start is None:
        x0 = prior
        label = "prior"
    else:
        x0 = np.asarray(start, dtype=float).ravel()
        if x0.size != setup.T or np.any(x0 < 0) or np.any(x0 > prior * (1.0 + 1e-9) + 1e-15):
            raise InvalidSetupError("start must lie within [0, prior_error] componentwise")
        x0 = np.minimum(x0, prior)
        label = start_label or "warm"

    if not np.any(setup.counts > 0):
        return BayesErrors(prior, iterations=0, residual=0.0, start=label,
                           pooled_groups=pooling.groups() if not pooling.is_trivial else [])

    F = _reduced_rhs(spectrum.eigenvalues, pooling, setup.noise, setup.counts)
    x0_reduced = x0[pooling.representatives]
    try:
        eps_reduced, iterations, residual = damped_fixed_point(F, x0_reduced, opts)
    except SolverConvergenceError as e:
        log_solver_run(f"T={setup.T}", e.iterations, e.residual, False, time.perf_counter() - started)
        raise

    log_solver_run(f"T={setup.T}", iterations, residual, True, time.perf_counter() - started)
    return BayesErrors(
        pooling.expand(eps_reduced),
        iterations=iterations,
        residual=residual,
        start=label,
        pooled_groups=pooling.groups() if not pooling.is_trivial else [],
    )


def learning_curve(spectrum: KernelSpectrum, D, noise, fractions, n_grid,
                   opts: Optional[SolverOptions] = None,
                   check_uniqueness: bool = False) -> List[Tuple[float, BayesErrors]]:
    """Predicted errors along an ascending grid of total example counts.

    Each point is warm-started from the previous one. With check_uniqueness
    every point is solved again from eps = 0; the map is monotone, so the two
    runs bracket all fixed points and any difference is recorded.
    """
    opts = opts or SolverOptions.from_settings()
    D = require_task_covariance(D, opts.pd_tol)
    fractions = require_fractions(fractions, D.shape[0])
    grid = require_grid(n_grid)

    curve = []
    warm = None
    tol = NUMERICAL_CONSTANTS["MONOTONE_TOL"]
    for n in grid:
        setup = TaskSetup.from_fractions(D, noise, fractions, n)
        try:
            result = solve(spectrum, setup, opts, start=warm)
        except SolverConvergenceError as e:
            raise e.at_n(float(n)) from e
        result.n = float(n)

        if warm is not None and np.any(result.eps > warm * (1.0 + tol) + tol):
            message = f"errors increased along the grid at n={n:g}"
            result.diagnostics.append(message)
            logger.warning(message)

        if check_uniqueness:
            lower = solve(spectrum, setup, opts, start=np.zeros(setup.T), start_label="zero")
            gap = np.max(np.abs(lower.eps - result.eps) / (result.eps + opts.eps_floor))
            if gap > 1e-8:
                message = f"multiple fixed points at n={n:g}: relative gap {gap:.3e}"
                result.diagnostics.append(message)
                logger.warning(message)

        curve.append((float(n), result))
        warm = result.eps

    return curve
