"""Tests for the central logging configuration."""

import logging

import pytest

from fracplap.core.config import ExperimentConfig, config_hash
from fracplap.core.logging_config import (
    CleanFormatter,
    configure_application_loggers,
    get_logger,
    log_error,
    log_run_start,
    setup_logging,
)


def _record(name: str, message: str, level: int = logging.INFO) -> logging.LogRecord:
    return logging.LogRecord(name, level, __file__, 42, message, None, None)


class TestCleanFormatter:
    """Test the log line layout."""

    def test_package_prefix_stripped(self) -> None:
        """Test level, short module name and line number."""
        line = CleanFormatter().format(_record("fracplap.spectral.first", "λ₁ converged"))
        assert line.startswith("[INFO] [spectral.first:42] [")
        assert line.endswith("] λ₁ converged")

    def test_foreign_logger_kept(self) -> None:
        """Test that other logger names are left as they are."""
        line = CleanFormatter().format(_record("scipy.optimize", "done", logging.WARNING))
        assert line.startswith("[WARNING] [scipy.optimize:42]")


class TestSetup:
    """Test handler installation and logger levels."""

    def test_single_handler(self) -> None:
        """Test that repeated setup does not duplicate handlers."""
        root = logging.getLogger()
        saved = (root.level, list(root.handlers))
        try:
            setup_logging("DEBUG")
            setup_logging("DEBUG")
            assert len(root.handlers) == 1
            assert isinstance(root.handlers[0].formatter, CleanFormatter)
            assert root.level == logging.DEBUG
        finally:
            root.setLevel(saved[0])
            root.handlers[:] = saved[1]

    def test_application_loggers(self) -> None:
        """Test that subpackage loggers take the given level."""
        configure_application_loggers(logging.WARNING)
        try:
            assert logging.getLogger("fracplap.bifurcation").level == logging.WARNING
            assert logging.getLogger("fracplap.nonlinear").level == logging.WARNING
        finally:
            configure_application_loggers(logging.NOTSET)

    def test_get_logger(self) -> None:
        """Test that get_logger returns the named logger."""
        assert get_logger("fracplap.weights").name == "fracplap.weights"


class TestRunLogging:
    """Test run start and error lines."""

    def test_run_start(self, caplog: pytest.LogCaptureFixture) -> None:
        """Test that the digest prefix and grid are logged."""
        config = ExperimentConfig()
        digest = config_hash(config)
        with caplog.at_level(logging.INFO, logger="fracplap.cli"):
            log_run_start("eigen", config, digest)
        assert f"eigen starting (config {digest[:12]})" in caplog.text
        assert "Grid: n=64" in caplog.text

    def test_error_truncated(self, caplog: pytest.LogCaptureFixture) -> None:
        """Test that long messages are cut with an ellipsis."""
        with caplog.at_level(logging.ERROR, logger="fracplap.cli"):
            log_error(ValueError("x" * 400), "solve")
        assert "Error in solve: " in caplog.text
        assert "x" * 300 + "..." in caplog.text
        assert "x" * 301 not in caplog.text
