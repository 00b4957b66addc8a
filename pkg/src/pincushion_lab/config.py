"""
Configuration module for Pincushion Lab.

Environment variables (prefix ``PINCUSHION_``) only control logging.
Everything that can change a computed result is an explicit option object,
filled in from command-line flags or by the calling code.
"""

from pathlib import Path

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import field_validator
from pydantic_settings import BaseSettings
from pydantic_settings import SettingsConfigDict

from .logging_config import setup_logging

DEFAULT_LAMBDA_SCHEDULE = (1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6)
DEFAULT_DIMENSION_LIMIT = 64


class Settings(BaseSettings):
    """Process-level settings read from the environment."""

    model_config = SettingsConfigDict(
        env_prefix="PINCUSHION_",
        extra="ignore",
    )

    debug_mode: bool = Field(default=False, description="Enable debug logging")
    log_file: Path | None = Field(
        default=None, description="Also write log records to this file"
    )


class ProjectionOptions(BaseModel):
    """Options for the penalty-method projection and the sweep harness."""

    model_config = ConfigDict(frozen=True)

    lambda_schedule: tuple[float, ...] = Field(
        default=DEFAULT_LAMBDA_SCHEDULE,
        min_length=1,
        description="Penalty weights, one descent stage per value",
    )
    grad_tol: float = Field(
        default=1e-9,
        gt=0,
        description="Stage stops when every vertex block of the gradient has HS norm below this",
    )
    max_iterations: int = Field(
        default=10_000, ge=1, description="Iteration budget per stage"
    )
    hard_tolerance: float = Field(
        default=1e-6, gt=0, description="Edge defect required to report convergence"
    )
    armijo: float = Field(default=1e-4, gt=0, lt=1, description="Sufficient decrease")
    stall_window: int = Field(
        default=100, ge=1, description="Iterations over which a stage must make progress"
    )
    stall_rtol: float = Field(
        default=1e-12, ge=0, description="Relative improvement that counts as progress"
    )
    max_backtracks: int = Field(default=60, ge=1, description="Line search halvings")
    workers: int = Field(default=1, ge=1, description="Concurrent sweep trials")

    @field_validator("lambda_schedule")
    @classmethod
    def _check_schedule(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(lam < 0 for lam in value):
            msg = f"Penalty weights must be non-negative, got {value}"
            raise ValueError(msg)
        return value


class SettingsManager:
    """Manages the singleton Settings instance."""

    _instance: Settings | None = None

    @classmethod
    def get(cls) -> Settings:
        if cls._instance is None:
            cls._instance = Settings()
        return cls._instance

    @classmethod
    def reload(cls) -> Settings:
        cls._instance = Settings()
        return cls._instance

    @classmethod
    def reset(cls) -> None:
        cls._instance = None


def get_settings() -> Settings:
    return SettingsManager.get()


def reload_settings() -> Settings:
    return SettingsManager.reload()


# =============================================================================
# Initialize logging once when this module is imported
# =============================================================================

_initial_settings = get_settings()
logger = setup_logging(
    debug_mode=_initial_settings.debug_mode, log_file=_initial_settings.log_file
)
