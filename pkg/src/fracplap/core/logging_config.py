"""
Central logging configuration for fracplap.

This module provides the single formatter and handler setup used by the
command-line front end and by library code that wants consistent log lines.
"""

import logging
import sys
from datetime import datetime
from typing import Any

from fracplap.core.constants import PACKAGE_NAME

_PREFIX = f"{PACKAGE_NAME}."


class CleanFormatter(logging.Formatter):
    """Plain formatter: level, module, line, ISO timestamp, message."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record with clean output."""
        module_name = record.name
        if module_name.startswith(_PREFIX):
            module_name = module_name[len(_PREFIX) :]

        timestamp = datetime.fromtimestamp(record.created).isoformat()

        formatted_message = f"[{record.levelname}] [{module_name}:{record.lineno}] [{timestamp}] {record.getMessage()}"

        if record.exc_info:
            formatted_message += "\n" + self.formatException(record.exc_info)

        return formatted_message


def setup_logging(level: str = "INFO") -> None:
    """
    Set up centralized logging on the root logger.

    Args:
        level: Logging level name (default: "INFO")
    """
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(CleanFormatter())

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, level.upper(), logging.INFO))

    # Clear any existing handlers to avoid duplicates
    root_logger.handlers.clear()
    root_logger.addHandler(handler)


def configure_application_loggers(level: int = logging.INFO) -> None:
    """
    Configure the loggers of the numerical subpackages.

    Args:
        level: Logging level to set for application loggers
    """
    app_loggers = [
        f"{PACKAGE_NAME}.cli",
        f"{PACKAGE_NAME}.weights",
        f"{PACKAGE_NAME}.discretization",
        f"{PACKAGE_NAME}.spectral",
        f"{PACKAGE_NAME}.regularity",
        f"{PACKAGE_NAME}.nonlinear",
        f"{PACKAGE_NAME}.bifurcation",
        f"{PACKAGE_NAME}.reporting",
    ]

    for logger_name in app_loggers:
        logging.getLogger(logger_name).setLevel(level)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance with the given name.

    Args:
        name: Logger name (typically __name__ from the calling module)

    Returns:
        Configured logger instance
    """
    return logging.getLogger(name)


def log_run_start(command: str, config: Any, config_hash: str) -> None:
    """
    Log the start of a command with the resolved configuration identity.

    Args:
        command: CLI subcommand name
        config: Resolved experiment configuration
        config_hash: SHA-256 of the canonical configuration
    """
    logger = get_logger(f"{PACKAGE_NAME}.cli")
    logger.info(f"{command} starting (config {config_hash[:12]})")
    logger.info(
        f"Grid: n={config.domain.n} on ({config.domain.left}, {config.domain.right}), "
        f"p={config.operator.p}, s={config.operator.s}"
    )


def _truncate_text(text: str, max_length: int = 100) -> str:
    """
    Truncate text to a maximum length with ellipsis if needed.

    Args:
        text: Text to truncate
        max_length: Maximum length before truncation

    Returns:
        Truncated text with '...' if it was longer than max_length
    """
    if len(text) <= max_length:
        return text
    return text[:max_length] + "..."


def log_error(error: Exception, context: str = "") -> None:
    """
    Log error with consistent formatting and context.

    Args:
        error: Exception that occurred
        context: Where the error occurred (truncated if too long)
    """
    logger = get_logger(f"{PACKAGE_NAME}.cli")

    error_msg = _truncate_text(str(error), 300)

    if context:
        logger.error(f"Error in {_truncate_text(context, 100)}: {error_msg}")
    else:
        logger.error(f"Error: {error_msg}")
