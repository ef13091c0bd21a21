"""
Task setup, solver options and prediction result types
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from config.enums import NUMERICAL_CONSTANTS
from config.settings import Settings, settings as default_settings
from utils import validators


@dataclass(frozen=True, eq=False)
class TaskSetup:
    """Inter-task covariance D, per-task noise variances and example counts"""
    D: np.ndarray
    noise: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        D = validators.require_task_covariance(self.D)
        T = D.shape[0]
        noise = validators.require_noise(self.noise, T)
        counts = validators.require_counts(self.counts, T)
        for array in (D, noise, counts):
            array.setflags(write=False)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "counts", counts)

    @property
    def T(self) -> int:
        return int(self.D.shape[0])

    @classmethod
    def from_fractions(cls, D, noise, fractions, n: float) -> "TaskSetup":
        """Real-valued allocation n_tau = n * pi_tau"""
        return cls(D, noise, float(n) * np.asarray(fractions, dtype=float))

    def permuted(self, order) -> "TaskSetup":
        """Same setup with tasks reordered"""
        order = np.asarray(order, dtype=int)
        return TaskSetup(self.D[np.ix_(order, order)], self.noise[order], self.counts[order])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "D": self.D.tolist(),
            "noise": self.noise.tolist(),
            "counts": self.counts.tolist(),
        }


def equicorrelated(T: int, rho: float) -> np.ndarray:
    """Unit-diagonal T x T matrix with constant off-diagonal rho"""
    D = np.full((T, T), float(rho))
    np.fill_diagonal(D, 1.0)
    return D


@dataclass
class SolverOptions:
    """Damped fixed-point iteration controls"""
    tol: float = 1e-10
    max_iter: int = 100000
    pd_tol: float = 1e-10
    eps_floor: float = NUMERICAL_CONSTANTS["EPS_FLOOR"]
    beta_init: float = NUMERICAL_CONSTANTS["BETA_INIT"]
    beta_min: float = NUMERICAL_CONSTANTS["BETA_MIN"]

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None, **overrides) -> "SolverOptions":
        settings = settings or default_settings
        values = {
            "tol": settings.solver_tol,
            "max_iter": settings.solver_max_iter,
            "pd_tol": settings.pd_tol,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class BayesErrors:
    """Average Bayes errors at one point of a learning curve"""
    eps: np.ndarray
    iterations: int
    residual: float
    start: str = "prior"  # "prior", "warm" or "zero"
    n: Optional[float] = None
    pooled_groups: List[List[int]] = field(default_factory=list)
    diagnostics: List[str] = field(default_factory=list)

    @property
    def T(self) -> int:
        return int(self.eps.size)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "eps": self.eps.tolist(),
            "iterations": self.iterations,
            "residual": self.residual,
            "start": self.start,
            "pooled_groups": self.pooled_groups,
            "diagnostics": list(self.diagnostics),
        }


@dataclass
class GainReport:
    """Multi-task gain factors and the eigensystem of Gamma^1/2 D Gamma^1/2"""
    gains: np.ndarray
    gamma: np.ndarray
    deltas: np.ndarray
    vectors: np.ndarray  # columns are eigenvectors v_a
    alpha: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gains": self.gains.tolist(),
            "gamma": self.gamma.tolist(),
            "deltas": self.deltas.tolist(),
            "alpha": self.alpha,
        }


@dataclass
class ManyTaskPoint:
    """One point of an equicorrelated many-task learning curve"""
    n: float
    eps: float
    stage1: float
    stage2: float
    plateau: float
    iterations: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "eps": self.eps,
            "stage1": None if math.isnan(self.stage1) else self.stage1,
            "stage2": None if math.isnan(self.stage2) else self.stage2,
            "plateau": self.plateau,
            "iterations": self.iterations,
        }
