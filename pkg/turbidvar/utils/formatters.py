"""
Output formatters.

Converts reports into tidy pandas tables for CSV export and into console
text.
"""

import pandas as pd

from turbidvar.core.models import ComparisonRow, FitReport, ForecastPoint, ParameterSummary
from turbidvar.templates.messages import FIT_DONE

SUMMARY_COLUMNS = ["parameter", "mean", "sd", "q2.5", "q50", "q97.5", "rhat", "ess"]
FORECAST_COLUMNS = ["t", "date", "site", "mean", "lower", "upper", "observed"]
COMPARISON_COLUMNS = ["model", "waic", "waic_se", "looic", "looic_se", "spectral_radius"]
EFFECT_COLUMNS = ["covariate", "site", "site_group", "mean", "q2.5", "q97.5", "excludes_zero"]


def summaries_frame(summaries: list[ParameterSummary]) -> pd.DataFrame:
    """One row per parameter."""
    rows = [
        (s.name, s.mean, s.sd, s.q2_5, s.q50, s.q97_5, s.rhat, s.ess) for s in summaries
    ]
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def forecasts_frame(forecasts: list[ForecastPoint]) -> pd.DataFrame:
    """One row per (t, site); ``observed`` is empty for missing cells."""
    rows = [(f.t, f.date, f.site, f.mean, f.lower, f.upper, f.observed) for f in forecasts]
    return pd.DataFrame(rows, columns=FORECAST_COLUMNS)


def comparison_frame(rows: list[ComparisonRow]) -> pd.DataFrame:
    """Comparison table sorted by WAIC (stable for ties)."""
    frame = pd.DataFrame([r.model_dump() for r in rows], columns=COMPARISON_COLUMNS)
    return frame.sort_values("waic", kind="stable").reset_index(drop=True)


def format_fit_result(report: FitReport, out_dir: str) -> str:
    """
    Console summary of a fit.

    Args:
        report: Finished fit report
        out_dir: Directory the outputs were written to

    Returns:
        Multi-line text with R-hat range, divergences and criteria
    """
    low, high = report.rhat_range()
    return FIT_DONE.format(
        variant=report.variant.value,
        n_chains=report.n_chains,
        n_draws=report.n_draws,
        rhat_low=low,
        rhat_high=high,
        divergences=report.telemetry.total_divergences,
        waic=report.waic.waic,
        waic_se=report.waic.se,
        looic=report.looic.looic,
        looic_se=report.looic.se,
        out_dir=out_dir,
    )


def format_comparison(frame: pd.DataFrame) -> str:
    return frame.to_string(index=False, float_format=lambda v: f"{v:.2f}")


def effects_frame(effects) -> pd.DataFrame:
    """Covariate effects by (covariate, site) with their 95% interval."""
    rows = [
        (
            e.covariate,
            e.site,
            e.site_group,
            e.summary.mean,
            e.summary.q2_5,
            e.summary.q97_5,
            e.excludes_zero,
        )
        for e in effects
    ]
    return pd.DataFrame(rows, columns=EFFECT_COLUMNS)
