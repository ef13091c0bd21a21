"""
Enums and constants for MTLC
Centralized definitions for kernels, input distributions and run outputs
"""

from enum import Enum


class KernelKind(str, Enum):
    """Input-space covariance functions"""
    SQUARED_EXPONENTIAL = "squared_exponential"
    ORNSTEIN_UHLENBECK = "ornstein_uhlenbeck"
    DEGENERATE = "degenerate"

class InputKind(str, Enum):
    """Input distributions P(x)"""
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"

class SpectrumMethod(str, Enum):
    """How a kernel spectrum is obtained"""
    AUTO = "auto"
    ANALYTIC = "analytic"
    NYSTROM = "nystrom"

class AllocationMode(str, Enum):
    """How simulated examples are assigned to tasks"""
    ORDERED = "ordered"
    RANDOM = "random"

class OutputKind(str, Enum):
    """Scenario outputs written by the harness"""
    PREDICT = "predict"
    SIMULATE = "simulate"
    ASYMPTOTIC = "asymptotic"
    GAIN_SWEEP = "gain_sweep"
    MANY_TASK = "many_task"

# System Constants
SYSTEM_CONSTANTS = {
    "APP_NAME": "MTLC Multi-Task Learning Curves",
    "VERSION": "1.0.0",
    "CSV_FLOAT_FORMAT": "%.17g",
    "MANIFEST_NAME": "manifest.json",
}

# Numerical Constants
NUMERICAL_CONSTANTS = {
    # spectra
    "NEGATIVE_EIGENVALUE_CLAMP": 1e-12,
    "NYSTROM_NODES_PER_EIGENVALUE": 8,
    "REFINEMENT_EIGENVALUE_FLOOR": 1e-10,
    "OU_BISECTION_STEPS": 80,
    "GAUSSIAN_QUADRATURE_HALF_WIDTH": 10.0,
    # solver
    "EPS_FLOOR": 1e-14,
    "BETA_INIT": 1.0,
    "BETA_MIN": 1.0 / 64.0,
    "MONOTONE_TOL": 1e-10,
    # asymptotics
    "ASYMPTOTIC_VALIDITY_RATIO": 0.1,
    "DELTA_ZERO_TOL": 1e-12,
    # simulator
    "VARIANCE_CLAMP": 1e-9,
    "UNIFORM_TEST_NODES": 512,
    "GAUSSIAN_TEST_SAMPLES": 2048,
}
