"""
Input-space covariance evaluation
"""

import math
from typing import Optional

import numpy as np
from scipy import special

from config.enums import InputKind, KernelKind
from models.errors import InvalidSetupError
from models.spectrum_models import InputDist, KernelSpec


def degenerate_basis(dist: InputDist, x: np.ndarray, size: int) -> np.ndarray:
    """First `size` functions of an orthonormal basis under P(x), shape (len(x), size).

    Cosines on the interval for uniform inputs, normalised probabilists'
    Hermite polynomials for Gaussian inputs.
    """
    x = np.asarray(x, dtype=float).ravel()
    k = np.arange(size)
    if dist.kind == InputKind.UNIFORM:
        u = (x - dist.lo) / (dist.hi - dist.lo)
        basis = math.sqrt(2.0) * np.cos(np.pi * np.outer(u, k))
        basis[:, 0] = 1.0
        return basis
    t = x / math.sqrt(dist.variance)
    norms = np.sqrt(special.factorial(k))
    return special.eval_hermitenorm(k[None, :], t[:, None]) / norms


def kernel_matrix(kernel: KernelSpec, x, y, dist: Optional[InputDist] = None) -> np.ndarray:
    """C(x_i, y_j) for 1-D inputs"""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()

    if kernel.kind == KernelKind.SQUARED_EXPONENTIAL:
        diff = x[:, None] - y[None, :]
        return np.exp(-0.5 * (diff / kernel.lengthscale) ** 2)

    if kernel.kind == KernelKind.ORNSTEIN_UHLENBECK:
        diff = x[:, None] - y[None, :]
        return np.exp(-np.abs(diff) / kernel.lengthscale)

    if dist is None:
        raise InvalidSetupError("degenerate kernel needs the input distribution for its basis")
    values = np.asarray(kernel.eigenvalues)
    phi_x = degenerate_basis(dist, x, values.size)
    phi_y = degenerate_basis(dist, y, values.size)
    return (phi_x * values) @ phi_y.T


def kernel_diag(kernel: KernelSpec, x, dist: Optional[InputDist] = None) -> np.ndarray:
    """C(x, x); one for the stationary kernels"""
    x = np.asarray(x, dtype=float).ravel()
    if kernel.kind != KernelKind.DEGENERATE:
        return np.ones_like(x)
    if dist is None:
        raise InvalidSetupError("degenerate kernel needs the input distribution for its basis")
    values = np.asarray(kernel.eigenvalues)
    phi = degenerate_basis(dist, x, values.size)
    return (phi ** 2) @ values
