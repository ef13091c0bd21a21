"""
Kernel, input distribution and spectrum types
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from config.enums import InputKind, KernelKind
from .errors import InvalidSetupError


@dataclass(frozen=True)
class KernelSpec:
    """Unit-variance stationary kernel C(x, x'), or a finite-rank kernel"""
    kind: KernelKind
    lengthscale: float = 1.0
    smoothness: Optional[float] = None  # r override; None -> kernel default
    eigenvalues: Tuple[float, ...] = ()  # degenerate kernels only

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if self.kind == KernelKind.DEGENERATE:
            if not self.eigenvalues:
                raise InvalidSetupError("degenerate kernel needs at least one eigenvalue")
            if any(v < 0 for v in self.eigenvalues):
                raise InvalidSetupError("degenerate kernel eigenvalues must be non-negative")
            object.__setattr__(self, "eigenvalues", tuple(float(v) for v in self.eigenvalues))
        elif not self.lengthscale > 0:
            raise InvalidSetupError(f"lengthscale must be positive, got {self.lengthscale}")
        if self.smoothness is not None and self.smoothness < 0:
            raise InvalidSetupError(f"smoothness r must be non-negative, got {self.smoothness}")

    @classmethod
    def squared_exponential(cls, lengthscale: float) -> "KernelSpec":
        return cls(KernelKind.SQUARED_EXPONENTIAL, lengthscale)

    @classmethod
    def ornstein_uhlenbeck(cls, lengthscale: float, smoothness: Optional[float] = None) -> "KernelSpec":
        return cls(KernelKind.ORNSTEIN_UHLENBECK, lengthscale, smoothness)

    @classmethod
    def degenerate(cls, eigenvalues) -> "KernelSpec":
        return cls(KernelKind.DEGENERATE, eigenvalues=tuple(eigenvalues))

    @property
    def r(self) -> float:
        """Mean-square differentiability order; inf for SE and finite rank.

        OU defaults to r=0, the value consistent with its i^-2 eigenvalue tail
        under the decay rule i^-(2r+2).
        """
        if self.smoothness is not None:
            return float(self.smoothness)
        if self.kind == KernelKind.ORNSTEIN_UHLENBECK:
            return 0.0
        return math.inf

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "lengthscale": self.lengthscale,
            "smoothness": self.smoothness,
            "eigenvalues": list(self.eigenvalues),
        }


@dataclass(frozen=True)
class InputDist:
    """One-dimensional input density P(x)"""
    kind: InputKind
    variance: float = 1.0
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", InputKind(self.kind))
        if self.kind == InputKind.GAUSSIAN and not self.variance > 0:
            raise InvalidSetupError(f"input variance must be positive, got {self.variance}")
        if self.kind == InputKind.UNIFORM and not self.lo < self.hi:
            raise InvalidSetupError(f"uniform interval needs lo < hi, got [{self.lo}, {self.hi}]")

    @classmethod
    def gaussian(cls, variance: float) -> "InputDist":
        return cls(InputKind.GAUSSIAN, variance=variance)

    @classmethod
    def uniform(cls, lo: float = 0.0, hi: float = 1.0) -> "InputDist":
        return cls(InputKind.UNIFORM, lo=lo, hi=hi)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw i.i.d. inputs"""
        if self.kind == InputKind.GAUSSIAN:
            return rng.normal(0.0, math.sqrt(self.variance), size)
        return rng.uniform(self.lo, self.hi, size)

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == InputKind.GAUSSIAN:
            return {"kind": self.kind.value, "variance": self.variance}
        return {"kind": self.kind.value, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True, eq=False)
class KernelSpectrum:
    """Descending kernel eigenvalues w.r.t. P(x), plus the discarded trace"""
    eigenvalues: np.ndarray
    tail_mass: float = 0.0
    r: float = math.inf
    label: str = ""
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.eigenvalues, dtype=float).ravel()
        if values.size == 0:
            raise InvalidSetupError("spectrum needs at least one eigenvalue")
        if np.any(values < 0):
            raise InvalidSetupError("spectrum eigenvalues must be non-negative")
        if np.any(np.diff(values) > 0):
            raise InvalidSetupError("spectrum eigenvalues must be sorted in descending order")
        if self.tail_mass < 0:
            raise InvalidSetupError(f"tail_mass must be non-negative, got {self.tail_mass}")
        if self.r < 0:
            raise InvalidSetupError(f"smoothness r must be non-negative, got {self.r}")
        values.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))
        object.__setattr__(self, "r", float(self.r))

    @property
    def M(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def trace(self) -> float:
        """tr Lambda over the kept eigenvalues"""
        return float(np.sum(self.eigenvalues))

    @property
    def total_trace(self) -> float:
        return self.trace + self.tail_mass

    @property
    def alpha(self) -> float:
        """Decay exponent of g(h) ~ h^-alpha"""
        if math.isinf(self.r):
            return 1.0
        return (2.0 * self.r + 1.0) / (2.0 * self.r + 2.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "M": self.M,
            "trace": self.trace,
            "tail_mass": self.tail_mass,
            "r": None if math.isinf(self.r) else self.r,
            "alpha": self.alpha,
            **self.metadata,
        }
