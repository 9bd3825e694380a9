"""Configuration module."""

from turbidvar.config.run_config import RunConfig, load_config, parse_config
from turbidvar.config.settings import Settings, get_settings

__all__ = ["RunConfig", "Settings", "get_settings", "load_config", "parse_config"]
