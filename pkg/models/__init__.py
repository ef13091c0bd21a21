"""
MTLC Models Package
Domain types for spectra, task setups, predictions and simulations
"""

__version__ = "1.0.0"
__author__ = "MTLC Team"

from .errors import (
    LearningCurveError,
    InvalidSetupError,
    SpectrumError,
    SingularTaskCovarianceError,
    SolverConvergenceError,
    PosteriorFactorizationError,
    ScenarioConfigError
)
from .spectrum_models import KernelSpec, InputDist, KernelSpectrum
from .task_models import (
    TaskSetup,
    SolverOptions,
    BayesErrors,
    GainReport,
    ManyTaskPoint,
    equicorrelated
)
from .simulation_models import Dataset, SimulationOptions, SimEstimate, GainSweepRow

__all__ = [
    # Errors
    'LearningCurveError',
    'InvalidSetupError',
    'SpectrumError',
    'SingularTaskCovarianceError',
    'SolverConvergenceError',
    'PosteriorFactorizationError',
    'ScenarioConfigError',

    # Spectra
    'KernelSpec',
    'InputDist',
    'KernelSpectrum',

    # Tasks and predictions
    'TaskSetup',
    'SolverOptions',
    'BayesErrors',
    'GainReport',
    'ManyTaskPoint',
    'equicorrelated',

    # Simulation
    'Dataset',
    'SimulationOptions',
    'SimEstimate',
    'GainSweepRow'
]
