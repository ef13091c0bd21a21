"""
Kernel operator spectra with respect to an input density

Eigenvalues solve <C(x, x') phi_i(x')>_{x'} = lambda_i phi_i(x) and are
returned in descending order, with the trace that truncation discards kept
as tail_mass.
"""

import math
from typing import Optional, Sequence

import numpy as np
from scipy import linalg, special

from config.enums import InputKind, KernelKind, NUMERICAL_CONSTANTS, SpectrumMethod
from config.logging_config import get_logger
from config.settings import settings
from models.errors import InvalidSetupError, SpectrumError
from models.spectrum_models import InputDist, KernelSpec, KernelSpectrum
from utils.quadrature import quadrature_for
from .kernels import kernel_matrix

logger = get_logger(__name__)


def _require_size(M: int):
    if int(M) != M or M < 1:
        raise InvalidSetupError(f"spectrum size M must be a positive integer, got {M}")


def se_gaussian_spectrum(lengthscale: float, input_variance: float, M: int) -> KernelSpectrum:
    """Closed-form spectrum of the SE kernel under N(0, input_variance).

    lambda_k = sqrt(2a/A) B^k for k = 0, 1, ... with a = 1/(4 s^2),
    b = 1/(2 l^2), c = sqrt(a^2 + 2ab), A = a + b + c and B = b/A.
    The geometric series sums to one.
    """
    if not lengthscale > 0:
        raise InvalidSetupError(f"lengthscale must be positive, got {lengthscale}")
    if not input_variance > 0:
        raise InvalidSetupError(f"input variance must be positive, got {input_variance}")
    _require_size(M)

    a = 1.0 / (4.0 * input_variance)
    b = 1.0 / (2.0 * lengthscale ** 2)
    c = math.sqrt(a * a + 2.0 * a * b)
    A = a + b + c
    B = b / A
    scale = math.sqrt(2.0 * a / A)

    eigenvalues = scale * B ** np.arange(M, dtype=float)
    tail_mass = scale * B ** M / (1.0 - B)

    return KernelSpectrum(
        eigenvalues,
        tail_mass=tail_mass,
        r=math.inf,
        label=f"se_gaussian(l={lengthscale:g}, var={input_variance:g})",
        metadata={"method": SpectrumMethod.ANALYTIC.value, "ratio_B": B},
    )


def _bisect_increasing(f, lo: np.ndarray, hi: np.ndarray, steps: int) -> np.ndarray:
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        positive = f(mid) > 0
        hi = np.where(positive, mid, hi)
        lo = np.where(positive, lo, mid)
    return 0.5 * (lo + hi)


def ou_uniform_spectrum(lengthscale: float, lo: float, hi: float, M: int,
                        smoothness: Optional[float] = None) -> KernelSpectrum:
    """Exact spectrum of exp(-|x - x'|/l) under the uniform density on [lo, hi].

    With half-width h and c = 1/l the eigenvalues are 2c / (w^2 + c^2) / (hi - lo),
    where wh solves t tan t = ch (even eigenfunctions) or t + ch tan t = 0 (odd).
    """
    if not lengthscale > 0:
        raise InvalidSetupError(f"lengthscale must be positive, got {lengthscale}")
    if not lo < hi:
        raise InvalidSetupError(f"uniform interval needs lo < hi, got [{lo}, {hi}]")
    _require_size(M)

    half = 0.5 * (hi - lo)
    c = 1.0 / lengthscale
    ch = c * half
    steps = NUMERICAL_CONSTANTS["OU_BISECTION_STEPS"]

    n_even = (M + 1) // 2
    n_odd = M // 2
    k_even = np.arange(n_even, dtype=float) * np.pi
    t_even = _bisect_increasing(lambda t: t * np.tan(t) - ch, k_even, k_even + 0.5 * np.pi, steps)
    k_odd = np.arange(n_odd, dtype=float) * np.pi
    t_odd = _bisect_increasing(lambda t: t + ch * np.tan(t), k_odd + 0.5 * np.pi, k_odd + np.pi, steps)

    # roots interleave even, odd, even, ... so eigenvalues come out descending
    t = np.empty(M)
    t[0::2] = t_even
    t[1::2] = t_odd
    omega = t / half
    eigenvalues = 2.0 * c / (omega ** 2 + c ** 2) / (hi - lo)
    tail_mass = max(0.0, 1.0 - float(np.sum(eigenvalues)))

    kernel = KernelSpec.ornstein_uhlenbeck(lengthscale, smoothness)
    return KernelSpectrum(
        eigenvalues,
        tail_mass=tail_mass,
        r=kernel.r,
        label=f"ou_uniform(l={lengthscale:g}, [{lo:g}, {hi:g}])",
        metadata={"method": SpectrumMethod.ANALYTIC.value},
    )


def nystrom_spectrum(kernel: KernelSpec, dist: InputDist, nodes: int, M: int) -> KernelSpectrum:
    """Top-M eigenvalues of the quadrature-discretized kernel operator"""
    _require_size(M)
    if nodes < M:
        raise InvalidSetupError(f"Nystrom needs nodes >= M, got nodes={nodes}, M={M}")

    x, w = quadrature_for(dist, nodes)
    root_w = np.sqrt(w)
    S = root_w[:, None] * kernel_matrix(kernel, x, x, dist) * root_w[None, :]
    S = 0.5 * (S + S.T)

    try:
        values = linalg.eigh(S, eigvals_only=True)
    except linalg.LinAlgError as e:
        raise SpectrumError(f"Nystrom eigenproblem did not converge with {nodes} nodes: {e}") from e

    clamp = NUMERICAL_CONSTANTS["NEGATIVE_EIGENVALUE_CLAMP"]
    if values[0] < -clamp:
        raise SpectrumError(
            f"Nystrom eigenvalue {values[0]:.3e} below -{clamp:g}; quadrature with {nodes} nodes failed"
        )
    values = np.clip(values[::-1], 0.0, None)

    total = float(np.sum(w * np.diag(kernel_matrix(kernel, x, x, dist))))
    kept = values[:M]
    tail_mass = max(0.0, total - float(np.sum(kept)))

    return KernelSpectrum(
        kept,
        tail_mass=tail_mass,
        r=kernel.r,
        label=f"nystrom({kernel.kind.value}, {dist.kind.value}, nodes={nodes})",
        metadata={"method": SpectrumMethod.NYSTROM.value, "nodes": nodes},
    )


def nystrom_refinement_defect(kernel: KernelSpec, dist: InputDist, nodes: int, M: int) -> float:
    """Max relative change of the top-M eigenvalues above the floor when nodes doubles"""
    coarse = nystrom_spectrum(kernel, dist, nodes, M).eigenvalues
    fine = nystrom_spectrum(kernel, dist, 2 * nodes, M).eigenvalues
    mask = fine > NUMERICAL_CONSTANTS["REFINEMENT_EIGENVALUE_FLOOR"]
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(coarse[mask] - fine[mask]) / fine[mask]))


def spectrum_from_values(values: Sequence[float], r: float = math.inf, tail_mass: float = 0.0,
                         label: str = "explicit") -> KernelSpectrum:
    """Spectrum from explicit eigenvalues, sorted descending"""
    values = np.sort(np.asarray(values, dtype=float).ravel())[::-1]
    return KernelSpectrum(values, tail_mass=tail_mass, r=r, label=label,
                          metadata={"method": SpectrumMethod.ANALYTIC.value})


def power_law_spectrum(M: int, r: float = 0.0) -> KernelSpectrum:
    """Unit-trace spectrum lambda_i = i^-(2r+2) / zeta(2r+2), first M terms"""
    _require_size(M)
    if r < 0:
        raise InvalidSetupError(f"smoothness r must be non-negative, got {r}")
    exponent = 2.0 * r + 2.0
    i = np.arange(1, M + 1, dtype=float)
    norm = float(special.zeta(exponent, 1))
    values = i ** (-exponent) / norm
    # Hurwitz zeta gives the exact remainder sum_{i > M}
    tail_mass = float(special.zeta(exponent, M + 1)) / norm
    return KernelSpectrum(values, tail_mass=tail_mass, r=r, label=f"power_law(r={r:g})",
                          metadata={"method": SpectrumMethod.ANALYTIC.value})


def truncate(spectrum: KernelSpectrum, tail_tol: float) -> KernelSpectrum:
    """Shortest prefix whose discarded trace is below tail_tol times the total trace"""
    if not 0.0 < tail_tol < 1.0:
        raise InvalidSetupError(f"tail_tol must be in (0, 1), got {tail_tol}")

    values = spectrum.eigenvalues
    total = spectrum.total_trace
    # discarded[k] = trace dropped when keeping the first k + 1 eigenvalues
    suffix = np.cumsum(values[::-1])[::-1]
    discarded = spectrum.tail_mass + np.append(suffix[1:], 0.0)
    ok = np.flatnonzero(discarded < tail_tol * total)
    if ok.size == 0:
        raise SpectrumError(
            f"tail_tol={tail_tol:g} unreachable: discarded trace {spectrum.tail_mass:.3e} "
            f"with all M={spectrum.M} eigenvalues kept; recompute with a larger M"
        )
    keep = int(ok[0]) + 1
    logger.debug(f"Truncated {spectrum.label} to M={keep} (tail {discarded[keep - 1]:.3e})")
    return KernelSpectrum(values[:keep], tail_mass=float(discarded[keep - 1]), r=spectrum.r,
                          label=spectrum.label, metadata=dict(spectrum.metadata))


def kernel_spectrum(kernel: KernelSpec, dist: InputDist, M: int,
                    method: SpectrumMethod = SpectrumMethod.AUTO,
                    nodes: Optional[int] = None,
                    tail_tol: Optional[float] = None) -> KernelSpectrum:
    """Spectrum for a (kernel, input distribution) pair, analytic where available"""
    method = SpectrumMethod(method)
    _require_size(M)

    analytic = None
    if kernel.kind == KernelKind.DEGENERATE:
        values = np.sort(np.asarray(kernel.eigenvalues))[::-1]
        analytic = spectrum_from_values(values[:M], kernel.r, tail_mass=float(np.sum(values[M:])),
                                        label="degenerate")
    elif method != SpectrumMethod.NYSTROM:
        if kernel.kind == KernelKind.SQUARED_EXPONENTIAL and dist.kind == InputKind.GAUSSIAN:
            analytic = se_gaussian_spectrum(kernel.lengthscale, dist.variance, M)
        elif kernel.kind == KernelKind.ORNSTEIN_UHLENBECK and dist.kind == InputKind.UNIFORM:
            analytic = ou_uniform_spectrum(kernel.lengthscale, dist.lo, dist.hi, M, kernel.smoothness)
        if analytic is not None and kernel.smoothness is not None:
            analytic = KernelSpectrum(analytic.eigenvalues, analytic.tail_mass, kernel.r,
                                      analytic.label, dict(analytic.metadata))

    if analytic is None and method == SpectrumMethod.ANALYTIC:
        raise SpectrumError(
            f"no closed-form spectrum for {kernel.kind.value} kernel with {dist.kind.value} inputs"
        )

    if analytic is not None:
        spectrum = analytic
    else:
        if nodes is None:
            nodes = max(settings.min_nystrom_nodes, NUMERICAL_CONSTANTS["NYSTROM_NODES_PER_EIGENVALUE"] * M)
        spectrum = nystrom_spectrum(kernel, dist, nodes, M)

    logger.debug(f"Spectrum {spectrum.label}: M={spectrum.M}, tail={spectrum.tail_mass:.3e}")
    return truncate(spectrum, tail_tol) if tail_tol is not None else spectrum
