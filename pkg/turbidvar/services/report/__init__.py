"""Diagnostics, information criteria, summaries and forecasts."""

from turbidvar.services.report.criteria import loo_ic, pointwise_loglik, waic
from turbidvar.services.report.diagnostics import (
    ess,
    is_stationary,
    spectral_radius,
    split_rhat,
    summarize,
)
from turbidvar.services.report.forecast import (
    multi_step_forecast,
    one_step_forecast,
    predictive_coverage,
)
from turbidvar.services.report.service import ReportService, covariate_effects

__all__ = [
    "ReportService",
    "covariate_effects",
    "ess",
    "is_stationary",
    "loo_ic",
    "multi_step_forecast",
    "one_step_forecast",
    "pointwise_loglik",
    "predictive_coverage",
    "spectral_radius",
    "split_rhat",
    "summarize",
    "waic",
]
