"""
Service factory for dependency injection.

Creates and configures the fitting services from process settings. This
is the single point of service creation; commands get their services
through this factory.
"""

import logging

from turbidvar.config.settings import Settings
from turbidvar.services.orchestrator import FitOrchestrator
from turbidvar.services.report.service import ReportService
from turbidvar.services.sampler.service import SamplerService

logger = logging.getLogger(__name__)


class ServiceFactory:
    """
    Factory for creating application services.

    Usage:
        factory = ServiceFactory(settings)
        orchestrator = factory.create_orchestrator()
    """

    def __init__(self, settings: Settings):
        self._settings = settings
        logger.debug(
            f"ServiceFactory initialized: max_workers={settings.max_workers}, "
            f"forecast_draws={settings.forecast_draws}"
        )

    def create_sampler_service(self) -> SamplerService:
        logger.debug("Creating SamplerService")
        return SamplerService(max_workers=self._settings.max_workers)

    def create_report_service(self) -> ReportService:
        logger.debug("Creating ReportService")
        return ReportService(forecast_draws=self._settings.forecast_draws)

    def create_orchestrator(self) -> FitOrchestrator:
        """
        Create the fit orchestrator with all its dependencies.

        Returns:
            FitOrchestrator ready for use
        """
        return FitOrchestrator(
            sampler=self.create_sampler_service(),
            reporter=self.create_report_service(),
        )
