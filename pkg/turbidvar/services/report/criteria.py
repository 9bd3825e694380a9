"""
Pointwise log-likelihood and predictive information criteria.

Both criteria are reported on the deviance scale (-2 x expected log
predictive density), lower is better.

Likelihood points:
    ARCH, VARCH, VARICH   every observed (t, s) with t >= t0
    VAR_IW                every t >= t0 with at least one observed site;
                          missing sites are marginalized out of the MVN
"""

import logging
import math

import numpy as np
from scipy import special

from turbidvar.core.exceptions import InsufficientDrawsError, LengthMismatchError
from turbidvar.core.models import LooResult, ModelSpec, WaicResult
from turbidvar.kernels.densities import LOG_2PI, mvn_logpdf
from turbidvar.services.model.dataset import Dataset
from turbidvar.services.model.layout import ModelLayout
from turbidvar.services.model.posterior import (
    complete_data,
    predictive_means,
    variance_rows,
)

logger = logging.getLogger(__name__)

# Fraction of the largest importance ratios smoothed by the Pareto fit
TAIL_FRACTION = 0.2
MIN_TAIL_LENGTH = 5
# Shape above which the importance-sampling estimate is unreliable
PARETO_K_THRESHOLD = 0.7


def pointwise_loglik(draws, spec: ModelSpec, data: Dataset) -> np.ndarray:
    """
    Log-likelihood of every point under every pooled draw.

    Args:
        draws: PosteriorDraws produced for (spec, data)
        spec: Model specification
        data: Dataset the draws were fitted to

    Returns:
        (chains * draws) x points matrix

    Raises:
        LengthMismatchError: If the draws do not carry the layout's parameters
    """
    layout = ModelLayout(spec, data)
    if tuple(draws.names) != tuple(layout.names):
        raise LengthMismatchError(
            "Draws do not match the model and dataset.",
            f"{len(draws.names)} drawn parameters vs {layout.dimension} expected",
        )
    first = spec.variant.first_likelihood_index
    observed = ~np.asarray(data.mask)[first:]
    y = np.nan_to_num(np.asarray(data.Y, dtype=float))[first:]
    pooled = draws.pooled()

    if spec.variant.has_arch_variance:
        out = np.empty((pooled.shape[0], int(observed.sum())))
        for d, row in enumerate(pooled):
            params = layout.params_from_constrained(row)
            completed = complete_data(params, data)
            mean = predictive_means(params, spec, completed, data.X)
            var = variance_rows(params, spec, completed)
            cell = -0.5 * LOG_2PI - 0.5 * np.log(var) - 0.5 * (y - mean) ** 2 / var
            out[d] = cell[observed]
        return out

    times = [k for k in range(observed.shape[0]) if observed[k].any()]
    out = np.empty((pooled.shape[0], len(times)))
    for d, row in enumerate(pooled):
        params = layout.params_from_constrained(row)
        completed = complete_data(params, data)
        mean = predictive_means(params, spec, completed, data.X)
        for i, k in enumerate(times):
            sites = observed[k]
            out[d, i] = mvn_logpdf(
                y[k, sites], mean[k, sites], params.Sigma[np.ix_(sites, sites)]
            )
    return out


def _check_draws(loglik) -> np.ndarray:
    ll = np.asarray(loglik, dtype=float)
    if ll.ndim != 2 or ll.shape[0] < 2:
        raise InsufficientDrawsError(
            "Information criteria need at least 2 draws.", f"loglik shape {ll.shape}"
        )
    return ll


def _log_mean_exp(ll: np.ndarray) -> np.ndarray:
    """Column-wise log mean exp; constant columns return their value exactly."""
    out = special.logsumexp(ll, axis=0) - math.log(ll.shape[0])
    constant = np.ptp(ll, axis=0) == 0.0
    out[constant] = ll[0, constant]
    return out


def _deviance_se(elpd_i: np.ndarray) -> float:
    return 2.0 * math.sqrt(elpd_i.size * float(np.var(elpd_i)))


def waic(loglik) -> WaicResult:
    """
    Widely applicable information criterion.

    lppd = sum_i log mean_d exp(ll[d, i]), p_waic = sum_i var_d ll[d, i]
    (divisor n - 1), waic = -2 (lppd - p_waic).

    Raises:
        InsufficientDrawsError: Fewer than 2 draws
    """
    ll = _check_draws(loglik)
    lppd_i = _log_mean_exp(ll)
    p_i = np.var(ll, axis=0, ddof=1)
    elpd_i = lppd_i - p_i
    return WaicResult(
        waic=float(-2.0 * np.sum(elpd_i)),
        se=_deviance_se(elpd_i),
        p_waic=float(np.sum(p_i)),
        lppd=float(np.sum(lppd_i)),
    )


def fit_generalized_pareto(exceedances: np.ndarray) -> tuple[float, float]:
    """Method-of-moments (shape, scale) of a generalized Pareto sample."""
    mean = float(np.mean(exceedances))
    var = float(np.var(exceedances, ddof=1))
    shape = 0.5 * (1.0 - mean * mean / var)
    return shape, mean * (1.0 - shape)


def generalized_pareto_quantile(probs: np.ndarray, shape: float, scale: float) -> np.ndarray:
    if abs(shape) < np.finfo(float).eps:
        return -scale * np.log1p(-probs)
    return scale * np.expm1(-shape * np.log1p(-probs)) / shape


def pareto_smooth(log_ratios: np.ndarray) -> tuple[np.ndarray, float]:
    """
    Smooth the upper tail of one column of log importance ratios.

    The largest ``TAIL_FRACTION`` of ratios are replaced by the quantiles of
    a generalized Pareto fitted to their exceedances over the cutoff, then
    capped at the largest raw ratio. Tails shorter than ``MIN_TAIL_LENGTH``
    or without spread are left as they are with shape 0.

    Returns:
        (smoothed log ratios, fitted shape k)
    """
    x = np.array(log_ratios, dtype=float)
    x -= np.max(x)
    n = x.size
    tail_len = int(math.ceil(TAIL_FRACTION * n))
    if tail_len < MIN_TAIL_LENGTH or tail_len >= n:
        return x, 0.0
    order = np.argsort(x, kind="stable")
    tail_idx = order[-tail_len:]
    cutoff = x[order[-tail_len - 1]]
    exceedances = np.exp(x[tail_idx]) - math.exp(cutoff)
    if np.ptp(exceedances) == 0.0:
        return x, 0.0
    shape, scale = fit_generalized_pareto(exceedances)
    if not (np.isfinite(shape) and scale > 0):
        return x, float(shape) if np.isfinite(shape) else 0.0
    probs = (np.arange(tail_len) + 0.5) / tail_len
    smoothed = generalized_pareto_quantile(probs, shape, scale) + math.exp(cutoff)
    x[tail_idx] = np.log(smoothed)
    x = np.minimum(x, 0.0)
    return x, shape


def loo_ic(loglik, smooth: bool = True) -> LooResult:
    """
    Importance-sampling leave-one-out information criterion.

    Args:
        loglik: draws x points matrix
        smooth: Pareto-smooth the importance ratios; plain importance
            sampling when False

    Raises:
        InsufficientDrawsError: Fewer than 2 draws
    """
    ll = _check_draws(loglik)
    n_points = ll.shape[1]
    elpd_i = np.empty(n_points)
    k = np.zeros(n_points)
    for i in range(n_points):
        column = ll[:, i]
        if np.ptp(column) == 0.0:
            elpd_i[i] = column[0]
            continue
        log_w = -column
        if smooth:
            log_w, k[i] = pareto_smooth(log_w)
        elpd_i[i] = special.logsumexp(log_w + column) - special.logsumexp(log_w)

    flagged = [int(i) for i in np.flatnonzero(k > PARETO_K_THRESHOLD)]
    if flagged:
        logger.warning(f"{len(flagged)} of {n_points} points have Pareto k > {PARETO_K_THRESHOLD}")
    return LooResult(
        looic=float(-2.0 * np.sum(elpd_i)),
        se=_deviance_se(elpd_i),
        pareto_k=[float(v) for v in k],
        flagged_points=flagged,
    )
