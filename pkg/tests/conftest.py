"""
Shared fixtures for the MTLC test suite
"""

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from core.spectra import se_gaussian_spectrum, spectrum_from_values  # noqa: E402
from models.spectrum_models import InputDist, KernelSpec  # noqa: E402
from models.task_models import SolverOptions  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20100101)


@pytest.fixture
def smooth_spectrum():
    """SE kernel, l = 0.5, standard normal inputs"""
    return se_gaussian_spectrum(0.5, 1.0, 200)


@pytest.fixture
def fig_spectrum():
    """SE kernel used by the bundled Gaussian-input curves: l = 0.01, input variance 1/12"""
    return se_gaussian_spectrum(0.01, 1.0 / 12.0, 1024)


@pytest.fixture
def unit_spectrum():
    return spectrum_from_values([1.0])


@pytest.fixture
def tight_opts():
    return SolverOptions(tol=1e-13, max_iter=200000)


@pytest.fixture
def rank3_kernel():
    return KernelSpec.degenerate([0.5, 0.3, 0.2])


@pytest.fixture
def unit_interval():
    return InputDist.uniform(0.0, 1.0)
