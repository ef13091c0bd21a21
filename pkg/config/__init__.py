"""
MTLC Configuration Package
Settings, enums and logging configuration
"""

__version__ = "1.0.0"
__author__ = "MTLC Team"

from .settings import get_settings, Settings, settings
from .enums import (
    NUMERICAL_CONSTANTS,
    SYSTEM_CONSTANTS,
    AllocationMode,
    InputKind,
    KernelKind,
    OutputKind,
    SpectrumMethod
)
from .logging_config import (
    setup_logging,
    get_logger,
    log_scenario_event,
    log_solver_run,
    log_error,
    main_logger
)

__all__ = [
    # Settings
    'get_settings',
    'Settings',
    'settings',

    # Enums and Constants
    'NUMERICAL_CONSTANTS',
    'SYSTEM_CONSTANTS',
    'AllocationMode',
    'InputKind',
    'KernelKind',
    'OutputKind',
    'SpectrumMethod',

    # Logging
    'setup_logging',
    'get_logger',
    'log_scenario_event',
    'log_solver_run',
    'log_error',
    'main_logger'
]
