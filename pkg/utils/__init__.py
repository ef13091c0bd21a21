"""
MTLC Utilities Package
Validation, quadrature, task apportionment and random substreams
"""

__version__ = "1.0.0"
__author__ = "MTLC Team"

from .validators import (
    SetupValidator,
    require_task_covariance,
    require_noise,
    require_counts,
    require_fractions,
    require_grid,
    is_positive_definite
)
from .quadrature import gauss_legendre, gaussian_legendre, quadrature_for
from .apportionment import apportion, labels_from_counts
from .seeding import substream, scenario_key

__all__ = [
    # Validation
    'SetupValidator',
    'require_task_covariance',
    'require_noise',
    'require_counts',
    'require_fractions',
    'require_grid',
    'is_positive_definite',

    # Quadrature
    'gauss_legendre',
    'gaussian_legendre',
    'quadrature_for',

    # Allocation and seeding
    'apportion',
    'labels_from_counts',
    'substream',
    'scenario_key'
]
