"""
Fit report service.

Turns PosteriorDraws into a FitReport: convergence diagnostics, WAIC and
LOO-IC, parameter summaries, one-step forecasts with their coverage, and
the spectral radius of the posterior mean of Phi.
"""

import logging
from dataclasses import dataclass

import numpy as np

from turbidvar.core.exceptions import DiagnosticError, ZeroVarianceError
from turbidvar.core.models import (
    FitReport,
    ModelSpec,
    ParameterSummary,
    SamplerTelemetry,
)
from turbidvar.services.model.dataset import Dataset
from turbidvar.services.model.layout import ModelLayout
from turbidvar.services.report.criteria import loo_ic, pointwise_loglik, waic
from turbidvar.services.report.diagnostics import (
    ess,
    is_stationary,
    spectral_radius,
    split_rhat,
    summarize_values,
)
from turbidvar.services.report.forecast import (
    DEFAULT_FORECAST_DRAWS,
    one_step_forecast,
    predictive_coverage,
)

logger = logging.getLogger(__name__)

EMPTY_TELEMETRY = SamplerTelemetry(
    step_sizes=[], divergences=[], mean_accept=[], mean_leapfrog_steps=[]
)


@dataclass(frozen=True)
class CovariateEffect:
    """Posterior summary of one covariate effect at one site."""

    covariate: str
    site: str
    site_group: str
    summary: ParameterSummary

    @property
    def excludes_zero(self) -> bool:
        return self.summary.q2_5 > 0.0 or self.summary.q97_5 < 0.0


def posterior_mean_phi(draws, spec: ModelSpec, data: Dataset) -> np.ndarray:
    layout = ModelLayout(spec, data)
    values = np.array([draws.column(name).mean() for name in layout.phi_names()])
    return layout.phi_matrix(values)


def covariate_effects(draws, data: Dataset) -> list[CovariateEffect]:
    """Summaries of beta[j, s] labelled with covariate, site and site group."""
    effects = []
    for j, covariate in enumerate(data.covariate_names):
        for s, site in enumerate(data.sites):
            name = f"beta[{j + 1},{s + 1}]"
            effects.append(
                CovariateEffect(
                    covariate=covariate,
                    site=site,
                    site_group=data.site_groups[s].value,
                    summary=summarize_values(name, draws.column(name)),
                )
            )
    return effects


class ReportService:
    """
    Builds fit reports.

    Usage:
        service = ReportService(forecast_draws=1000)
        report = service.build(draws, spec, data, seed=1)
    """

    def __init__(self, forecast_draws: int = DEFAULT_FORECAST_DRAWS):
        self._forecast_draws = forecast_draws

    @property
    def forecast_draws(self) -> int:
        return self._forecast_draws

    def diagnostics(self, draws) -> tuple[dict, dict, list[str]]:
        """
        R-hat and ESS for every parameter.

        Constant parameters get R-hat None and are listed separately.
        """
        rhat: dict[str, float | None] = {}
        ess_values: dict[str, float] = {}
        zero_variance: list[str] = []
        for name in draws.names:
            chains = draws.column(name)
            try:
                rhat[name] = split_rhat(chains)
            except ZeroVarianceError:
                rhat[name] = None
                zero_variance.append(name)
            try:
                ess_values[name] = ess(chains)
            except DiagnosticError as e:
                logger.debug(f"ESS unavailable for {name}: {e}")
        if zero_variance:
            logger.warning(f"{len(zero_variance)} parameters have constant draws")
        return rhat, ess_values, zero_variance

    def build(self, draws, spec: ModelSpec, data: Dataset, seed: int = 0) -> FitReport:
        """
        Assemble the full report.

        Raises:
            LengthMismatchError: If draws do not match (spec, data)
            InsufficientDrawsError: With fewer than 2 pooled draws
        """
        rhat, ess_values, zero_variance = self.diagnostics(draws)
        summaries = [
            summarize_values(name, draws.column(name)).model_copy(
                update={"rhat": rhat[name], "ess": ess_values.get(name)}
            )
            for name in draws.names
        ]

        loglik = pointwise_loglik(draws, spec, data)
        logger.debug(f"Pointwise log-likelihood: {loglik.shape[1]} points")
        waic_result = waic(loglik)
        loo_result = loo_ic(loglik)

        forecasts = one_step_forecast(
            draws, spec, data, seed=seed, forecast_draws=self._forecast_draws
        )
        coverage = predictive_coverage(forecasts, data)
        phi_mean = posterior_mean_phi(draws, spec, data)
        radius = spectral_radius(phi_mean)

        report = FitReport(
            variant=spec.variant,
            n_chains=draws.n_chains,
            n_draws=draws.n_draws,
            rhat=rhat,
            ess=ess_values,
            zero_variance_parameters=zero_variance,
            waic=waic_result,
            looic=loo_result,
            summaries=summaries,
            forecasts=forecasts,
            coverage=coverage,
            spectral_radius=radius,
            stationary=is_stationary(phi_mean),
            telemetry=draws.telemetry or EMPTY_TELEMETRY,
        )
        low, high = report.rhat_range()
        logger.info(
            f"{spec.variant.value}: WAIC={waic_result.waic:.1f}, "
            f"LOOIC={loo_result.looic:.1f}, R-hat in [{low:.3f}, {high:.3f}], "
            f"spectral radius {radius:.3f}"
        )
        return report
