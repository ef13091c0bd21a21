"""
MTLC Harness Package
Scenario configs, the scenario runner and result writers
"""

__version__ = "1.0.0"
__author__ = "MTLC Team"

from .schema import RunConfig, ScenarioConfig, parse_run_config, format_validation_error
from .writers import write_table, write_manifest, package_versions
from .runner import (
    ScenarioRunner,
    bundled_configs,
    load_config,
    semantic_violations,
    EXIT_OK,
    EXIT_SCENARIO_FAILED,
    EXIT_INVALID_CONFIG
)

__all__ = [
    # Schema
    'RunConfig',
    'ScenarioConfig',
    'parse_run_config',
    'format_validation_error',

    # Writers
    'write_table',
    'write_manifest',
    'package_versions',

    # Runner
    'ScenarioRunner',
    'bundled_configs',
    'load_config',
    'semantic_violations',
    'EXIT_OK',
    'EXIT_SCENARIO_FAILED',
    'EXIT_INVALID_CONFIG'
]
