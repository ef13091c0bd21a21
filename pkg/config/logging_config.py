"""
Logging configuration for MTLC
Structured logging with console and optional file output
"""

import logging
import os
from pathlib import Path
from datetime import datetime
from typing import Dict, Optional

APP_LOGGER_NAME = "MTLC"

LOGS_DIR = Path(__file__).parent.parent / "logs"

# Log file paths
LOG_FILE = LOGS_DIR / f"mtlc_{datetime.now().strftime('%Y%m%d')}.log"
ERROR_LOG_FILE = LOGS_DIR / f"errors_{datetime.now().strftime('%Y%m%d')}.log"

# Log formats
DETAILED_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s"
SIMPLE_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

def setup_logging(log_level: str = "INFO", enable_file_logging: bool = False) -> logging.Logger:
    """
    Setup logging configuration

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        enable_file_logging: Whether to log to files under logs/

    Returns:
        Configured application logger
    """
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)

    logger = logging.getLogger(APP_LOGGER_NAME)
    logger.setLevel(numeric_level)
    logger.handlers.clear()

    console_handler = logging.StreamHandler()
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(logging.Formatter(SIMPLE_FORMAT))
    logger.addHandler(console_handler)

    if enable_file_logging:
        LOGS_DIR.mkdir(exist_ok=True)

        file_handler = logging.FileHandler(LOG_FILE, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(DETAILED_FORMAT))
        logger.addHandler(file_handler)

        error_handler = logging.FileHandler(ERROR_LOG_FILE, encoding='utf-8')
        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(logging.Formatter(DETAILED_FORMAT))
        logger.addHandler(error_handler)

    # Prevent duplicate logging
    logger.propagate = False

    logger.debug(f"Logging configured - Level: {log_level}, File logging: {enable_file_logging}")

    return logger

def get_logger(name: str = APP_LOGGER_NAME) -> logging.Logger:
    """Get logger instance for a module, nested under the application logger"""
    if name == APP_LOGGER_NAME or name.startswith(APP_LOGGER_NAME + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{APP_LOGGER_NAME}.{name}")

def log_scenario_event(scenario: str, event: str, details: Optional[Dict] = None):
    """Log scenario lifecycle events"""
    logger = get_logger(f"{APP_LOGGER_NAME}.Scenario")

    log_message = f"Scenario {scenario}: {event}"
    if details:
        log_message += f" - Details: {details}"

    logger.info(log_message)

def log_solver_run(label: str, iterations: int, residual: float, converged: bool,
                   elapsed: float = 0.0):
    """Log a fixed-point solve summary"""
    logger = get_logger(f"{APP_LOGGER_NAME}.Solver")

    status = "CONVERGED" if converged else "FAILED"
    log_message = f"Solve {status} - {label}, Iterations: {iterations}, Residual: {residual:.3e}, Time: {elapsed:.3f}s"

    if converged:
        logger.debug(log_message)
    else:
        logger.error(log_message)

def log_error(error: Exception, context: Optional[str] = None):
    """Log error with context"""
    logger = get_logger(f"{APP_LOGGER_NAME}.Error")

    error_message = f"ERROR: {str(error)}"
    if context:
        error_message = f"{context} - {error_message}"

    logger.error(error_message, exc_info=True)

# Configure logging on module import
main_logger = setup_logging(
    log_level=os.getenv("LOG_LEVEL", "INFO"),
    enable_file_logging=os.getenv("ENABLE_FILE_LOGGING", "False").lower() == "true"
)
