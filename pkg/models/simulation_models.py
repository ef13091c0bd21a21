"""
Monte-Carlo simulation result types
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from config.settings import Settings, settings as default_settings
from config.enums import AllocationMode


@dataclass(frozen=True, eq=False)
class Dataset:
    """Training inputs and their task labels; outputs never enter the posterior variance"""
    inputs: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=float).ravel()
        labels = np.asarray(self.labels, dtype=int).ravel()
        if inputs.size != labels.size:
            raise ValueError(f"inputs and labels differ in length: {inputs.size} vs {labels.size}")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return int(self.inputs.size)

    def extended(self, x: float, task: int) -> "Dataset":
        """Copy with one more training point"""
        return Dataset(np.append(self.inputs, x), np.append(self.labels, task))


@dataclass
class SimulationOptions:
    """Replica count, seeding and test averaging for the simulator"""
    replicas: int = 200
    seed: int = 20100101
    scenario_id: int = 0
    workers: int = 4
    allocation: AllocationMode = AllocationMode.ORDERED
    test_points: Optional[int] = None  # None -> default per input kind

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None, **overrides) -> "SimulationOptions":
        settings = settings or default_settings
        values = {
            "replicas": settings.default_replicas,
            "seed": settings.default_seed,
            "workers": settings.max_workers,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class SimEstimate:
    """Monte-Carlo Bayes-error estimate per task"""
    eps_hat: np.ndarray
    stderr: np.ndarray
    replicas: int
    seed: int
    tasks: List[int] = field(default_factory=list)
    elapsed: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps_hat": self.eps_hat.tolist(),
            "stderr": self.stderr.tolist(),
            "replicas": self.replicas,
            "seed": self.seed,
            "tasks": list(self.tasks),
        }


@dataclass
class GainSweepRow:
    """Normalized error reduction r at one rho^2"""
    rho2: float
    eps1_pred: float
    r_pred: float
    eps1_sim: float = float("nan")
    eps1_stderr: float = float("nan")
    r_sim: float = float("nan")
