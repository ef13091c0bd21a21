"""
MTLC Core Package
Kernel spectra, self-consistency solver, asymptotic limits and Monte-Carlo simulator
"""

__version__ = "1.0.0"
__author__ = "MTLC Team"

from .kernels import kernel_matrix, kernel_diag, degenerate_basis
from .spectra import (
    se_gaussian_spectrum,
    ou_uniform_spectrum,
    nystrom_spectrum,
    nystrom_refinement_defect,
    spectrum_from_values,
    power_law_spectrum,
    truncate,
    kernel_spectrum
)
from .solver import (
    prior_error,
    rhs,
    solve,
    learning_curve,
    resolvent_trace,
    damped_fixed_point,
    pool_tasks
)
from .asymptotics import (
    g,
    fit_alpha,
    asymptotic_errors,
    multitask_gain,
    power_law_errors,
    many_task_gain,
    pure_transfer_limit,
    pure_transfer_curve,
    g_T,
    many_task_curve
)
from .simulator import (
    sample_dataset,
    posterior_variance,
    PosteriorVariance,
    bayes_error_estimate,
    simulate_curve,
    gain_sweep
)

__all__ = [
    # Kernels and spectra
    'kernel_matrix',
    'kernel_diag',
    'degenerate_basis',
    'se_gaussian_spectrum',
    'ou_uniform_spectrum',
    'nystrom_spectrum',
    'nystrom_refinement_defect',
    'spectrum_from_values',
    'power_law_spectrum',
    'truncate',
    'kernel_spectrum',

    # Solver
    'prior_error',
    'rhs',
    'solve',
    'learning_curve',
    'resolvent_trace',
    'damped_fixed_point',
    'pool_tasks',

    # Asymptotics
    'g',
    'fit_alpha',
    'asymptotic_errors',
    'multitask_gain',
    'power_law_errors',
    'many_task_gain',
    'pure_transfer_limit',
    'pure_transfer_curve',
    'g_T',
    'many_task_curve',

    # Simulator
    'sample_dataset',
    'posterior_variance',
    'PosteriorVariance',
    'bayes_error_estimate',
    'simulate_curve',
    'gain_sweep'
]
