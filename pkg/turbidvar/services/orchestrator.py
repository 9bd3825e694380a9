"""
Fit orchestrator.

Coordinates a model fit without containing numerical logic.

Workflow:
1. Dataset.check_fittable → series long enough for the lags
2. TurbidityPosterior → log density for (spec, data)
3. SamplerService → PosteriorDraws
4. ReportService → FitReport
"""

import logging
import time
from dataclasses import dataclass

from turbidvar.core.exceptions import ConfigError
from turbidvar.core.models import FitReport, ModelSpec, SamplerConfig
from turbidvar.services.model.dataset import Dataset
from turbidvar.services.model.posterior import TurbidityPosterior
from turbidvar.services.report.service import ReportService
from turbidvar.services.sampler.service import PosteriorDraws, SamplerService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitResult:
    draws: PosteriorDraws
    report: FitReport


class FitOrchestrator:
    """
    Orchestrates fitting one model variant to one dataset.

    Each step is delegated to a specialized service:
    - Log density → TurbidityPosterior
    - Sampling → SamplerService
    - Diagnostics, criteria and forecasts → ReportService

    Usage:
        orchestrator = FitOrchestrator(sampler, reporter)
        result = orchestrator.fit(spec, data, SamplerConfig(seed=1))
    """

    def __init__(self, sampler: SamplerService, reporter: ReportService):
        self._sampler = sampler
        self._reporter = reporter

    def posterior(self, spec: ModelSpec, data: Dataset) -> TurbidityPosterior:
        """
        Raises:
            InvalidDatasetError: If the series is too short
            ConfigError: If the priors do not fit the number of sites
        """
        data.check_fittable()
        try:
            return TurbidityPosterior(spec, data)
        except ValueError as e:
            raise ConfigError("Priors do not match the dataset.", str(e)) from None

    def fit(self, spec: ModelSpec, data: Dataset, config: SamplerConfig) -> FitResult:
        """
        Sample the posterior and build its report.

        Raises:
            AllInitializationsFailedError: If a chain cannot start
            DiagnosticError: If the draws cannot be summarized
        """
        logger.info(
            f"Fitting {spec.variant.value}: T={data.n_times}, S={data.n_sites}, "
            f"missing={data.n_missing}, seed={config.seed}"
        )
        started = time.perf_counter()
        posterior = self.posterior(spec, data)
        draws = self._sampler.run(posterior, config)
        report = self._reporter.build(draws, spec, data, seed=config.seed)
        logger.info(
            f"Fit of {spec.variant.value} complete in "
            f"{time.perf_counter() - started:.1f}s"
        )
        return FitResult(draws=draws, report=report)

    def diagnose(
        self, draws: PosteriorDraws, spec: ModelSpec, data: Dataset, seed: int
    ) -> FitReport:
        """Rebuild the report of saved draws."""
        self.posterior(spec, data)
        return self._reporter.build(draws, spec, data, seed=seed)
