"""Tests for config and logging_config modules."""

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path

import pytest
from pydantic import ValidationError

from pincushion_lab.config import DEFAULT_LAMBDA_SCHEDULE
from pincushion_lab.config import ProjectionOptions
from pincushion_lab.config import Settings
from pincushion_lab.config import SettingsManager
from pincushion_lab.config import get_settings
from pincushion_lab.config import reload_settings
from pincushion_lab.logging_config import LOGGER_NAME
from pincushion_lab.logging_config import setup_logging


class TestSettings:
    """Tests for environment-driven settings."""

    def test_defaults(self, fresh_settings, monkeypatch: pytest.MonkeyPatch):
        """Without environment variables logging stays quiet."""
        monkeypatch.delenv("PINCUSHION_DEBUG_MODE", raising=False)
        monkeypatch.delenv("PINCUSHION_LOG_FILE", raising=False)
        settings = get_settings()
        assert settings.debug_mode is False
        assert settings.log_file is None

    def test_environment(self, fresh_settings, monkeypatch: pytest.MonkeyPatch, tmp_path: Path):
        """PINCUSHION_ variables are picked up on reload."""
        monkeypatch.setenv("PINCUSHION_DEBUG_MODE", "true")
        monkeypatch.setenv("PINCUSHION_LOG_FILE", str(tmp_path / "lab.log"))
        settings = reload_settings()
        assert settings.debug_mode is True
        assert settings.log_file == tmp_path / "lab.log"

    def test_singleton(self, fresh_settings):
        """get_settings returns the cached instance."""
        assert get_settings() is get_settings()
        assert isinstance(SettingsManager.get(), Settings)

    def test_reset(self, fresh_settings):
        """reset drops the cached instance."""
        first = get_settings()
        SettingsManager.reset()
        assert get_settings() is not first


class TestProjectionOptions:
    """Tests for ProjectionOptions validation."""

    def test_defaults(self):
        """Defaults run the penalty weights from 1 to 1e6."""
        options = ProjectionOptions()
        assert options.lambda_schedule == DEFAULT_LAMBDA_SCHEDULE
        assert options.lambda_schedule[0] == 1.0
        assert options.lambda_schedule[-1] == 1e6
        assert options.grad_tol == 1e-9
        assert options.max_iterations == 10_000

    def test_negative_weight(self):
        """Penalty weights are non-negative."""
        with pytest.raises(ValidationError, match="non-negative"):
            ProjectionOptions(lambda_schedule=(1.0, -1.0))

    def test_empty_schedule(self):
        """At least one stage is required."""
        with pytest.raises(ValidationError):
            ProjectionOptions(lambda_schedule=())

    def test_workers(self):
        """At least one worker."""
        with pytest.raises(ValidationError):
            ProjectionOptions(workers=0)

    def test_frozen(self):
        """Options are immutable."""
        options = ProjectionOptions()
        with pytest.raises(ValidationError):
            options.workers = 4


class TestSetupLogging:
    """Tests for setup_logging."""

    def test_level_follows_debug_flag(self):
        """Debug mode lowers the level; calling again never stacks handlers."""
        logger = logging.getLogger(LOGGER_NAME)
        before = list(logger.handlers)
        try:
            assert setup_logging(debug_mode=True).level == logging.DEBUG
            assert setup_logging().level == logging.INFO
            assert logger.handlers == before
        finally:
            logger.setLevel(logging.INFO)

    def test_file_handler(self, mocker, tmp_path: Path):
        """A log file adds a rotating file handler to a fresh logger."""
        fresh = logging.getLogger(f"{LOGGER_NAME}.test-file-handler")
        mocker.patch("pincushion_lab.logging_config.logging.getLogger", return_value=fresh)
        logger = setup_logging(log_file=tmp_path / "lab.log")
        try:
            assert logger is fresh
            assert any(isinstance(h, RotatingFileHandler) for h in logger.handlers)
        finally:
            for handler in list(fresh.handlers):
                handler.close()
                fresh.removeHandler(handler)
