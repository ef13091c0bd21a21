"""
Monte-Carlo Bayes errors from the exact multi-task GP posterior variance

Each replica samples training inputs, factorizes the Gram matrix
K = D[tau_l, tau_m] C(x_l, x_m) + sigma^2_{tau_l} delta_lm once and
averages V_tau(x) = D_tau,tau C(x, x) - k_tau(x)^T K^-1 k_tau(x) over test inputs.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from config.enums import AllocationMode, InputKind, NUMERICAL_CONSTANTS
from config.logging_config import get_logger
from models.errors import InvalidSetupError, PosteriorFactorizationError
from models.simulation_models import Dataset, GainSweepRow, SimEstimate, SimulationOptions
from models.spectrum_models import InputDist, KernelSpec, KernelSpectrum
from models.task_models import SolverOptions, TaskSetup, equicorrelated
from utils.apportionment import apportion, labels_from_counts
from utils.quadrature import gauss_legendre
from utils.seeding import substream
from utils.validators import require_fractions, require_grid, require_noise, require_task_covariance
from .kernels import kernel_diag, kernel_matrix
from .solver import solve
from .spectra import kernel_spectrum

logger = get_logger(__name__)

TEST_STREAM = 0
ALLOCATION_STREAM = 1
INPUT_STREAM = 2


def sample_dataset(dist: InputDist, counts: Sequence[int], seed: int,
                   scenario_id: int = 0, replica: int = 0) -> Dataset:
    """i.i.d. inputs from P(x), labelled task by task in index order.

    All inputs of a replica come from one substream, so the first m inputs do
    not depend on how the total is split across tasks.
    """
    counts = np.asarray(counts)
    if np.any(counts < 0) or np.any(counts != np.round(counts)):
        raise InvalidSetupError(f"counts must be non-negative integers, got {counts.tolist()}")
    counts = counts.astype(int)
    inputs = dist.sample(substream(seed, scenario_id, replica, INPUT_STREAM), int(counts.sum()))
    return Dataset(inputs, labels_from_counts(counts))


class PosteriorVariance:
    """Posterior variance V_tau(x) for one dataset, factorized once"""

    def __init__(self, kernel: KernelSpec, D: np.ndarray, noise: np.ndarray, ds: Dataset,
                 dist: Optional[InputDist] = None, replica: Optional[int] = None):
        self.kernel = kernel
        self.D = D
        self.dist = dist
        self.ds = ds
        self.factor = None

        if ds.n == 0:
            return
        labels = ds.labels
        K = D[np.ix_(labels, labels)] * kernel_matrix(kernel, ds.inputs, ds.inputs, dist)
        K[np.diag_indices_from(K)] += noise[labels]
        try:
            self.factor = linalg.cho_factor(K, lower=True, check_finite=False)
        except linalg.LinAlgError as e:
            raise PosteriorFactorizationError(
                f"Gram matrix of {ds.n} points is not positive definite: {e}", replica=replica
            ) from e

    def __call__(self, x, task: int) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        prior = self.D[task, task] * kernel_diag(self.kernel, x, self.dist)
        if self.factor is None:
            return prior

        k = self.D[task, self.ds.labels][:, None] * kernel_matrix(self.kernel, self.ds.inputs, x, self.dist)
        A = linalg.solve_triangular(self.factor[0], k, lower=True, check_finite=False)
        V = prior - np.sum(A ** 2, axis=0)

        clamp = NUMERICAL_CONSTANTS["VARIANCE_CLAMP"]
        if np.any(V < -clamp):
            raise PosteriorFactorizationError(f"posterior variance {V.min():.3e} below -{clamp:g}")
        return np.clip(V, 0.0, None)


def posterior_variance(kernel: KernelSpec, D, noise, ds: Dataset, x: float, task: int,
                       dist: Optional[InputDist] = None) -> float:
    """V_tau(x) after observing ds"""
    D = require_task_covariance(D)
    noise = require_noise(noise, D.shape[0])
    return float(PosteriorVariance(kernel, D, noise, ds, dist)(x, task)[0])


def _test_rule(dist: InputDist, test_points: Optional[int]):
    """Fixed quadrature for uniform inputs; None means draw samples per replica"""
    if dist.kind == InputKind.UNIFORM:
        size = test_points or NUMERICAL_CONSTANTS["UNIFORM_TEST_NODES"]
        return gauss_legendre(size, dist.lo, dist.hi)
    return None


def _estimate(kernel: KernelSpec, dist: InputDist, D: np.ndarray, noise: np.ndarray,
              allocate: Callable[[int], np.ndarray], opts: SimulationOptions,
              tasks: Sequence[int]) -> SimEstimate:
    if opts.replicas < 2:
        raise InvalidSetupError(f"replicas must be at least 2, got {opts.replicas}")
    started = time.perf_counter()
    rule = _test_rule(dist, opts.test_points)
    samples = opts.test_points or NUMERICAL_CONSTANTS["GAUSSIAN_TEST_SAMPLES"]

    def run_replica(replica: int) -> np.ndarray:
        ds = sample_dataset(dist, allocate(replica), opts.seed, opts.scenario_id, replica)
        if rule is None:
            rng = substream(opts.seed, opts.scenario_id, replica, TEST_STREAM)
            x, w = dist.sample(rng, samples), np.full(samples, 1.0 / samples)
        else:
            x, w = rule
        posterior = PosteriorVariance(kernel, D, noise, ds, dist, replica=replica)
        return np.array([w @ posterior(x, task) for task in tasks])

    workers = max(1, int(opts.workers))
    if workers == 1:
        per_replica = [run_replica(i) for i in range(opts.replicas)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            per_replica = list(executor.map(run_replica, range(opts.replicas)))

    # rows in replica order, so the reduction does not depend on completion order
    values = np.vstack(per_replica)
    return SimEstimate(
        eps_hat=values.mean(axis=0),
        stderr=values.std(axis=0, ddof=1) / math.sqrt(opts.replicas),
        replicas=opts.replicas,
        seed=opts.seed,
        tasks=list(tasks),
        elapsed=time.perf_counter() - started,
    )


def _resolve_tasks(tasks: Optional[Sequence[int]], T: int) -> List[int]:
    if tasks is None:
        return list(range(T))
    tasks = [int(t) for t in tasks]
    if not tasks or min(tasks) < 0 or max(tasks) >= T:
        raise InvalidSetupError(f"tasks must be indices in 0..{T - 1}, got {tasks}")
    return tasks


def bayes_error_estimate(kernel: KernelSpec, dist: InputDist, D, noise, counts,
                         replicas: int, test_points: Optional[int], seed: int,
                         tasks: Optional[Sequence[int]] = None, scenario_id: int = 0,
                         workers: int = 1) -> SimEstimate:
    """Dataset-averaged Bayes error per task with its standard error"""
    D = require_task_covariance(D)
    T = D.shape[0]
    noise = require_noise(noise, T)
    counts = np.asarray(counts)
    if counts.size != T:
        raise InvalidSetupError(f"counts must have {T} entries, got {counts.size}")
    opts = SimulationOptions(replicas=replicas, seed=seed, scenario_id=scenario_id,
                             workers=workers, test_points=test_points)
    return _estimate(kernel, dist, D, noise, lambda replica: counts, opts, _resolve_tasks(tasks, T))


def simulate_curve(kernel: KernelSpec, dist: InputDist, D, noise, fractions, n_grid,
                   opts: Optional[SimulationOptions] = None,
                   tasks: Optional[Sequence[int]] = None) -> List[Tuple[int, SimEstimate]]:
    """Simulated learning curve with integer allocation of each n to tasks"""
    opts = opts or SimulationOptions.from_settings()
    D = require_task_covariance(D)
    T = D.shape[0]
    noise = require_noise(noise, T)
    fractions = require_fractions(fractions, T)
    tasks = _resolve_tasks(tasks, T)
    mode = AllocationMode(opts.allocation)

    curve = []
    for n in require_grid(n_grid):
        n = int(round(n))
        if mode == AllocationMode.ORDERED:
            counts = apportion(n, fractions)
            allocate = lambda replica, counts=counts: counts
        else:
            allocate = lambda replica, n=n: apportion(
                n, fractions, mode,
                substream(opts.seed, opts.scenario_id, replica, ALLOCATION_STREAM),
            )
        estimate = _estimate(kernel, dist, D, noise, allocate, opts, tasks)
        logger.debug(f"Simulated n={n}: eps={estimate.eps_hat.tolist()} ({estimate.elapsed:.2f}s)")
        curve.append((n, estimate))
    return curve


def _reduction(eps: float, eps_independent: float, eps_pooled: float) -> float:
    span = eps_independent - eps_pooled
    return (eps - eps_pooled) / span if span != 0 else math.nan


def gain_sweep(kernel: KernelSpec, dist: InputDist, noise, fractions, n: float, rho2_grid,
               replicas: int, seed: int, spectrum: Optional[KernelSpectrum] = None,
               solver_opts: Optional[SolverOptions] = None, scenario_id: int = 0,
               workers: int = 1) -> List[GainSweepRow]:
    """Normalized reduction r = [eps1(rho) - eps1(1)] / [eps1(0) - eps1(1)] over rho^2.

    Predictions use n_tau = n pi_tau; simulations (replicas > 0) use integer
    allocation and share seeds across rho^2.
    """
    rho2_grid = np.asarray(rho2_grid, dtype=float).ravel()
    if rho2_grid.size == 0 or np.any(rho2_grid < 0) or np.any(rho2_grid > 1):
        raise InvalidSetupError("rho2 grid must be non-empty and inside [0, 1]")
    noise = require_noise(noise, 2)
    fractions = require_fractions(fractions, 2)
    spectrum = spectrum or kernel_spectrum(kernel, dist, 256)
    solver_opts = solver_opts or SolverOptions.from_settings()
    counts = apportion(int(round(n)), fractions)

    def predict(rho2):
        setup = TaskSetup.from_fractions(equicorrelated(2, math.sqrt(rho2)), noise, fractions, n)
        return float(solve(spectrum, setup, solver_opts).eps[0])

    def simulate(rho2):
        estimate = bayes_error_estimate(kernel, dist, equicorrelated(2, math.sqrt(rho2)), noise,
                                        counts, replicas, None, seed, tasks=[0],
                                        scenario_id=scenario_id, workers=workers)
        return float(estimate.eps_hat[0]), float(estimate.stderr[0])

    pred_0, pred_1 = predict(0.0), predict(1.0)
    if replicas > 0:
        sim_0, sim_1 = simulate(0.0)[0], simulate(1.0)[0]

    rows = []
    for rho2 in rho2_grid:
        eps_pred = predict(rho2)
        row = GainSweepRow(float(rho2), eps_pred, _reduction(eps_pred, pred_0, pred_1))
        if replicas > 0:
            row.eps1_sim, row.eps1_stderr = simulate(rho2)
            row.r_sim = _reduction(row.eps1_sim, sim_0, sim_1)
        rows.append(row)
    return rows
