"""
Exception hierarchy for MTLC
"""

from typing import List, Optional


class LearningCurveError(Exception):
    """Base class for all MTLC errors"""


class InvalidSetupError(LearningCurveError, ValueError):
    """Inputs violate a precondition (shapes, signs, ranges)"""


class SpectrumError(LearningCurveError):
    """Spectrum could not be computed or truncated as requested"""


class SingularTaskCovarianceError(LearningCurveError):
    """Inter-task covariance D is not positive definite"""

    def __init__(self, message: str, min_eigenvalue: Optional[float] = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class SolverConvergenceError(LearningCurveError):
    """Damped fixed-point iteration did not reach the requested tolerance"""

    def __init__(self, message: str, residual: float, iterations: int,
                 n: Optional[float] = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.n = n

    def at_n(self, n: float) -> "SolverConvergenceError":
        """Copy of this error with the offending total example count attached"""
        return SolverConvergenceError(
            f"{self.args[0]} (at n={n:g})", self.residual, self.iterations, n=n
        )


class PosteriorFactorizationError(LearningCurveError):
    """Gram matrix of a sampled dataset could not be Cholesky-factorized"""

    def __init__(self, message: str, replica: Optional[int] = None):
        super().__init__(message)
        self.replica = replica


class ScenarioConfigError(LearningCurveError):
    """Scenario config failed schema or semantic validation"""

    def __init__(self, message: str, violations: Optional[List[str]] = None):
        super().__init__(message)
        self.violations = list(violations or [])
