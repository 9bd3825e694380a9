"""
Services module - numerical and workflow layer.

Contains the model, sampler, report, simulate and data services plus the
ServiceFactory and FitOrchestrator that wire them together.
"""

from turbidvar.services.factory import ServiceFactory
from turbidvar.services.orchestrator import FitOrchestrator, FitResult

__all__ = ["FitOrchestrator", "FitResult", "ServiceFactory"]
