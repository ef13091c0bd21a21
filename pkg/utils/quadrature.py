"""
Quadrature rules matched to input distributions

Weights are probability weights: they sum to one, so that
sum_j w_j f(x_j) approximates <f(x)> under P(x).
"""

import math
from typing import Tuple

import numpy as np
from scipy import special, stats

from config.enums import InputKind, NUMERICAL_CONSTANTS
from models.errors import InvalidSetupError
from models.spectrum_models import InputDist


def gauss_legendre(n: int, lo: float = 0.0, hi: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on [lo, hi] with weights for the uniform density"""
    if n < 1:
        raise InvalidSetupError(f"quadrature needs at least one node, got {n}")
    xi, w = special.roots_legendre(n)
    half = 0.5 * (hi - lo)
    return lo + half * (xi + 1.0), 0.5 * w


def gaussian_legendre(n: int, variance: float = 1.0,
                      half_width: float = NUMERICAL_CONSTANTS["GAUSSIAN_QUADRATURE_HALF_WIDTH"]
                      ) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on [-half_width * sd, half_width * sd] weighted by the N(0, variance) density"""
    if not variance > 0:
        raise InvalidSetupError(f"variance must be positive, got {variance}")
    sd = math.sqrt(variance)
    x, w = gauss_legendre(n, -half_width * sd, half_width * sd)
    w = w * stats.norm.pdf(x, scale=sd)
    return x, w / np.sum(w)


def quadrature_for(dist: InputDist, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Quadrature rule matched to the input distribution"""
    if dist.kind == InputKind.UNIFORM:
        return gauss_legendre(n, dist.lo, dist.hi)
    return gaussian_legendre(n, dist.variance)
