"""
Process settings loaded from environment variables.

Uses pydantic-settings for automatic loading from a .env file. Run
configuration (dataset, model, sampler) lives in the JSON config instead,
see ``turbidvar.config.run_config``.
"""

from functools import lru_cache
from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Project root directory (where .env file is located)
PROJECT_ROOT = Path(__file__).parent.parent.parent


class Settings(BaseSettings):
    """
    Process configuration.

    Every field reads TURBIDVAR_<NAME>, e.g. TURBIDVAR_LOG_LEVEL=DEBUG.

    Attributes:
        log_level: Logging verbosity
        max_workers: Chains sampled in parallel, at most this many threads
        forecast_draws: Target predictive samples per (t, s) cell
    """

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"

    max_workers: int = Field(default=4, gt=0)

    forecast_draws: int = Field(default=1000, gt=0)

    model_config = SettingsConfigDict(
        env_prefix="TURBIDVAR_",
        env_file=PROJECT_ROOT / ".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        env_ignore_empty=True,
    )


@lru_cache
def get_settings() -> Settings:
    """
    Get cached process settings.

    Settings are loaded once and reused for the whole command.
    """
    return Settings()
