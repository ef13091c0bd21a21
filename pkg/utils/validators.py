"""
Input validation utilities for MTLC
Checks on inter-task covariances, noise levels, counts, fractions and grids
"""

from typing import Any, Dict, Sequence

import numpy as np
from scipy import linalg

from config.logging_config import get_logger
from models.errors import InvalidSetupError

logger = get_logger(__name__)

class SetupValidator:
    """Validation for task setups and experiment grids"""

    def __init__(self, pd_tol: float = 1e-10, sum_tol: float = 1e-9, symmetry_tol: float = 1e-12):
        self.pd_tol = pd_tol
        self.sum_tol = sum_tol
        self.symmetry_tol = symmetry_tol

    def validate_task_covariance(self, D: Any) -> Dict[str, Any]:
        """Validate an inter-task covariance matrix D"""
        errors = []
        warnings = []

        D = np.asarray(D, dtype=float)
        if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] == 0:
            errors.append(f"D must be a non-empty square matrix, got shape {D.shape}")
            return {"valid": False, "errors": errors, "warnings": warnings, "min_eigenvalue": None}

        if not np.all(np.isfinite(D)):
            errors.append("D contains non-finite entries")
            return {"valid": False, "errors": errors, "warnings": warnings, "min_eigenvalue": None}

        scale = max(1.0, float(np.max(np.abs(D))))
        if np.max(np.abs(D - D.T)) > self.symmetry_tol * scale:
            errors.append("D must be symmetric")

        if np.any(np.diag(D) <= 0):
            errors.append("D must have a positive diagonal")

        min_eigenvalue = float(linalg.eigvalsh(0.5 * (D + D.T))[0])
        if min_eigenvalue < -self.pd_tol:
            errors.append(f"D has a negative eigenvalue {min_eigenvalue:.3e}")
        elif min_eigenvalue <= self.pd_tol:
            warnings.append(
                f"D is singular (min eigenvalue {min_eigenvalue:.3e}); fully correlated tasks will be pooled"
            )

        return {
            "valid": len(errors) == 0,
            "errors": errors,
            "warnings": warnings,
            "min_eigenvalue": min_eigenvalue
        }

    def validate_positive_vector(self, values: Any, name: str, size: int, allow_zero: bool) -> Dict[str, Any]:
        """Validate a per-task vector of noise variances or counts"""
        errors = []

        values = np.asarray(values, dtype=float).ravel()
        if values.size != size:
            errors.append(f"{name} must have {size} entries, got {values.size}")
        elif not np.all(np.isfinite(values)):
            errors.append(f"{name} contains non-finite entries")
        elif allow_zero and np.any(values < 0):
            errors.append(f"{name} must be non-negative")
        elif not allow_zero and np.any(values <= 0):
            errors.append(f"{name} must be positive")

        return {"valid": len(errors) == 0, "errors": errors, "warnings": []}

    def validate_fractions(self, fractions: Sequence[float]) -> Dict[str, Any]:
        """Validate task fractions pi (non-negative, summing to one)"""
        errors = []

        fractions = np.asarray(fractions, dtype=float).ravel()
        if fractions.size == 0:
            errors.append("fractions must not be empty")
        elif np.any(fractions < 0):
            errors.append("fractions must be non-negative")
        elif abs(float(np.sum(fractions)) - 1.0) > self.sum_tol:
            errors.append(f"fractions must sum to 1, got {float(np.sum(fractions)):.12g}")

        return {"valid": len(errors) == 0, "errors": errors, "warnings": []}

    def validate_grid(self, n_grid: Sequence[float], strict: bool = False) -> Dict[str, Any]:
        """Validate an ascending grid of total example counts"""
        errors = []

        grid = np.asarray(n_grid, dtype=float).ravel()
        if grid.size == 0:
            errors.append("n_grid must not be empty")
        elif np.any(grid < 0):
            errors.append("n_grid must be non-negative")
        elif strict and np.any(np.diff(grid) <= 0):
            errors.append("n_grid must be strictly ascending")
        elif np.any(np.diff(grid) < 0):
            errors.append("n_grid must be ascending")

        return {"valid": len(errors) == 0, "errors": errors, "warnings": []}

def _raise_on_errors(result: Dict[str, Any]) -> Dict[str, Any]:
    if not result["valid"]:
        raise InvalidSetupError("; ".join(result["errors"]))
    for warning in result.get("warnings", []):
        logger.debug(warning)
    return result

def require_task_covariance(D: Any, pd_tol: float = 1e-10) -> np.ndarray:
    """Return D as a symmetrized float array or raise InvalidSetupError"""
    _raise_on_errors(SetupValidator(pd_tol=pd_tol).validate_task_covariance(D))
    D = np.asarray(D, dtype=float)
    return 0.5 * (D + D.T)

def require_noise(noise: Any, size: int) -> np.ndarray:
    """Broadcast a scalar noise level and require positive entries"""
    noise = np.broadcast_to(np.asarray(noise, dtype=float), (size,)).copy() \
        if np.ndim(noise) == 0 else np.asarray(noise, dtype=float).ravel()
    _raise_on_errors(SetupValidator().validate_positive_vector(noise, "noise", size, allow_zero=False))
    return noise

def require_counts(counts: Any, size: int) -> np.ndarray:
    counts = np.asarray(counts, dtype=float).ravel()
    _raise_on_errors(SetupValidator().validate_positive_vector(counts, "counts", size, allow_zero=True))
    return counts

def require_fractions(fractions: Any, size: int) -> np.ndarray:
    fractions = np.asarray(fractions, dtype=float).ravel()
    if fractions.size != size:
        raise InvalidSetupError(f"fractions must have {size} entries, got {fractions.size}")
    _raise_on_errors(SetupValidator().validate_fractions(fractions))
    return fractions

def require_grid(n_grid: Any) -> np.ndarray:
    grid = np.asarray(n_grid, dtype=float).ravel()
    _raise_on_errors(SetupValidator().validate_grid(grid))
    return grid

def is_positive_definite(D: Any, pd_tol: float = 1e-10) -> bool:
    """True when the smallest eigenvalue of symmetric D exceeds pd_tol"""
    D = np.asarray(D, dtype=float)
    return bool(linalg.eigvalsh(0.5 * (D + D.T))[0] > pd_tol)
