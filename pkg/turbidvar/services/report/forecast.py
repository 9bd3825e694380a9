"""
Posterior predictive forecasts and interval coverage.
"""

import logging
import math

import numpy as np
import pandas as pd

from turbidvar.core.exceptions import LengthMismatchError, TimeIndexOutOfRangeError
from turbidvar.core.models import CovariateRole, ForecastPoint, ModelSpec
from turbidvar.services.model.dataset import Dataset
from turbidvar.services.model.layout import ModelLayout
from turbidvar.services.model.posterior import (
    complete_data,
    conditional_mean,
    conditional_variance,
    predictive_means,
    variance_rows,
)

logger = logging.getLogger(__name__)

INTERVAL = (0.025, 0.975)
DEFAULT_FORECAST_DRAWS = 1000


def _parameter_draws(draws, spec: ModelSpec, data: Dataset):
    layout = ModelLayout(spec, data)
    if tuple(draws.names) != tuple(layout.names):
        raise LengthMismatchError(
            "Draws do not match the model and dataset.",
            f"{len(draws.names)} drawn parameters vs {layout.dimension} expected",
        )
    return [layout.params_from_constrained(row) for row in draws.pooled()]


def _point(t: int, date, site: str, mean: float, lower: float, upper: float, observed):
    return ForecastPoint(
        t=t,
        date=str(pd.Timestamp(date).date()),
        site=site,
        mean=float(mean),
        lower=float(lower),
        upper=float(upper),
        observed=None if observed is None else float(observed),
    )


def one_step_forecast(
    draws,
    spec: ModelSpec,
    data: Dataset,
    seed: int = 0,
    forecast_draws: int = DEFAULT_FORECAST_DRAWS,
    times: list[int] | None = None,
) -> list[ForecastPoint]:
    """
    One-step-ahead predictive distribution at every (t, s) with t >= t0.

    The predictive mean is the posterior mean of M_t. Interval bounds are
    the 2.5% and 97.5% quantiles of predictive samples, drawing
    ceil(forecast_draws / n_draws) samples per posterior draw.

    Args:
        draws: PosteriorDraws for (spec, data)
        spec: Model specification
        data: Fitted dataset
        seed: Seed of the predictive sampling
        forecast_draws: Total number of predictive samples to aim for
        times: 0-based times to report, all of t >= t0 when None

    Raises:
        TimeIndexOutOfRangeError: If a requested time is before t0 or past T
    """
    first = spec.variant.first_likelihood_index
    if times is None:
        times = list(range(first, data.n_times))
    for t in times:
        if not first <= t < data.n_times:
            raise TimeIndexOutOfRangeError(
                "Forecast time has too few lags or lies beyond the series.",
                f"t={t} outside [{first}, {data.n_times})",
            )
    rows = np.asarray(times, dtype=int) - first
    params_list = _parameter_draws(draws, spec, data)
    per_draw = max(1, math.ceil(forecast_draws / len(params_list)))
    rng = np.random.default_rng(seed)
    n_sites = data.n_sites

    means = np.zeros((len(rows), n_sites))
    samples = np.empty((len(params_list) * per_draw, len(rows), n_sites))
    for d, params in enumerate(params_list):
        completed = complete_data(params, data)
        mean = predictive_means(params, spec, completed, data.X)[rows]
        means += mean
        noise = rng.standard_normal((per_draw, len(rows), n_sites))
        if spec.variant.has_arch_variance:
            sd = np.sqrt(variance_rows(params, spec, completed)[rows])
            noise = noise * sd
        else:
            noise = noise @ np.linalg.cholesky(params.Sigma).T
        samples[d * per_draw : (d + 1) * per_draw] = mean + noise
    means /= len(params_list)
    lower, upper = np.quantile(samples, INTERVAL, axis=0, method="linear")

    points = []
    for i, t in enumerate(times):
        for s, site in enumerate(data.sites):
            observed = None if data.mask[t, s] else data.Y[t, s]
            points.append(
                _point(t, data.dates[t], site, means[i, s], lower[i, s], upper[i, s], observed)
            )
    logger.debug(f"One-step forecasts: {len(points)} cells, {samples.shape[0]} samples per cell")
    return points


def default_future_covariates(spec: ModelSpec, data: Dataset, horizon: int) -> np.ndarray:
    """Operations off and wind held at its per-site mean, P x horizon x S."""
    future = np.zeros((data.n_covariates, horizon, data.n_sites))
    for j, role in enumerate(spec.covariate_roles):
        if role is CovariateRole.WIND:
            future[j] = data.X[j].mean(axis=0)
    return future


def multi_step_forecast(
    draws,
    spec: ModelSpec,
    data: Dataset,
    horizon: int,
    future_covariates: np.ndarray | None = None,
    seed: int = 0,
) -> list[ForecastPoint]:
    """
    Predictive paths ``horizon`` days past the end of the data.

    Each posterior draw simulates one path forward from its completed
    series; means and intervals are taken over paths.

    Raises:
        ValueError: If horizon < 1
        LengthMismatchError: If future covariates have the wrong shape
    """
    if horizon < 1:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if future_covariates is None:
        future_covariates = default_future_covariates(spec, data, horizon)
    future_covariates = np.asarray(future_covariates, dtype=float)
    if future_covariates.shape != (data.n_covariates, horizon, data.n_sites):
        raise LengthMismatchError(
            "Future covariates have the wrong shape.",
            f"expected {(data.n_covariates, horizon, data.n_sites)}, "
            f"got {future_covariates.shape}",
        )
    params_list = _parameter_draws(draws, spec, data)
    rng = np.random.default_rng(seed)
    T = data.n_times
    X = np.concatenate([np.asarray(data.X), future_covariates], axis=1)

    paths = np.empty((len(params_list), horizon, data.n_sites))
    for d, params in enumerate(params_list):
        extended = np.vstack([complete_data(params, data), np.zeros((horizon, data.n_sites))])
        for h in range(horizon):
            t = T + h
            mean = conditional_mean(params, spec, extended, X, t)
            cov = conditional_variance(params, spec, extended, t)
            extended[t] = rng.multivariate_normal(mean, cov, method="cholesky")
        paths[d] = extended[T:]

    means = paths.mean(axis=0)
    lower, upper = np.quantile(paths, INTERVAL, axis=0, method="linear")
    last = pd.Timestamp(data.dates[-1])
    points = []
    for h in range(horizon):
        date = last + pd.Timedelta(days=h + 1)
        for s, site in enumerate(data.sites):
            points.append(
                _point(T + h, date, site, means[h, s], lower[h, s], upper[h, s], None)
            )
    return points


def predictive_coverage(forecasts: list[ForecastPoint], data: Dataset) -> float | None:
    """
    Fraction of observed entries inside their predictive interval.

    Returns:
        Coverage in [0, 1], or None when no forecast cell is observed
    """
    site_index = {site: s for s, site in enumerate(data.sites)}
    inside = 0
    total = 0
    for point in forecasts:
        s = site_index[point.site]
        if point.t >= data.n_times or data.mask[point.t, s]:
            continue
        value = data.Y[point.t, s]
        total += 1
        inside += int(point.lower <= value <= point.upper)
    if total == 0:
        return None
    return inside / total
