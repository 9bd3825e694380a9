"""
Core module - models, protocols, and exceptions.

This module contains the fundamental building blocks of the application:
- Configuration and report models (Pydantic)
- Protocol definitions (interfaces)
- Custom exceptions
"""

from turbidvar.core.exceptions import (
    ConfigError,
    DataError,
    DiagnosticError,
    NumericalError,
    SamplerError,
    SimulationError,
    TurbidVarError,
)
from turbidvar.core.models import (
    CovariateRole,
    FitReport,
    ModelSpec,
    ModelVariant,
    PriorConfig,
    SamplerConfig,
    SiteGroup,
)
from turbidvar.core.protocols import ConstrainedModel, LogDensity

__all__ = [
    # Exceptions
    "TurbidVarError",
    "ConfigError",
    "DataError",
    "NumericalError",
    "SamplerError",
    "DiagnosticError",
    "SimulationError",
    # Models
    "ModelVariant",
    "SiteGroup",
    "CovariateRole",
    "PriorConfig",
    "ModelSpec",
    "SamplerConfig",
    "FitReport",
    # Protocols
    "LogDensity",
    "ConstrainedModel",
]
