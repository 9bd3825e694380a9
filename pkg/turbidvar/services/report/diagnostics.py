"""
Convergence diagnostics and posterior summaries.

Functions take a chains x draws array for one scalar parameter.
"""

import logging

import numpy as np

from turbidvar.core.exceptions import InsufficientDrawsError, ZeroVarianceError
from turbidvar.core.models import ParameterSummary

logger = logging.getLogger(__name__)


def _as_chains(chains) -> np.ndarray:
    ary = np.asarray(chains, dtype=float)
    if ary.ndim == 1:
        ary = ary[None, :]
    if ary.ndim != 2 or ary.shape[0] < 1:
        raise InsufficientDrawsError(
            "Draws must be a chains x draws array.", f"got shape {ary.shape}"
        )
    return ary


def split_chains(chains: np.ndarray) -> np.ndarray:
    """Halve every chain; the middle draw of an odd-length chain is dropped."""
    ary = _as_chains(chains)
    half = ary.shape[1] // 2
    return np.vstack((ary[:, :half], ary[:, -half:]))


def split_rhat(chains) -> float:
    """
    Split potential scale reduction factor.

    Args:
        chains: chains x draws array (a 1-D sequence is one chain)

    Returns:
        sqrt(((n - 1) / n * W + B / n) / W) over the half-chains

    Raises:
        InsufficientDrawsError: Fewer than 2 draws per chain
        ZeroVarianceError: All draws identical
    """
    ary = _as_chains(chains)
    if ary.shape[1] < 2:
        raise InsufficientDrawsError(
            "R-hat needs at least 2 draws per chain.", f"got {ary.shape[1]}"
        )
    halves = split_chains(ary)
    n = halves.shape[1]
    # single-draw halves carry no within-chain information
    within = float(np.mean(np.var(halves, axis=1, ddof=1))) if n > 1 else 0.0
    if within == 0.0:
        if np.ptp(ary) == 0.0:
            raise ZeroVarianceError(
                "R-hat is undefined for constant draws.",
                f"all {ary.size} draws equal {ary.flat[0]}",
            )
        return float("inf")
    between = n * float(np.var(halves.mean(axis=1), ddof=1))
    pooled = (n - 1) / n * within + between / n
    return float(np.sqrt(pooled / within))


def autocovariance(x: np.ndarray) -> np.ndarray:
    """Biased autocovariance of a 1-D series at all lags, via FFT."""
    x = np.asarray(x, dtype=float)
    n = x.size
    centered = x - x.mean()
    size = 2 ** int(np.ceil(np.log2(2 * n)))
    spectrum = np.fft.rfft(centered, n=size)
    acov = np.fft.irfft(spectrum * np.conjugate(spectrum), n=size)[:n]
    return acov / n


def ess(chains) -> float:
    """
    Effective sample size with Geyer's initial monotone sequence.

    Raises:
        InsufficientDrawsError: Fewer than 4 draws per chain
    """
    ary = _as_chains(chains)
    n_chain, n_draw = ary.shape
    if n_draw < 4:
        raise InsufficientDrawsError(
            "ESS needs at least 4 draws per chain.", f"got {n_draw}"
        )
    acov = np.asarray([autocovariance(row) for row in ary])
    mean_var = float(np.mean(acov[:, 0])) * n_draw / (n_draw - 1.0)
    var_plus = mean_var * (n_draw - 1.0) / n_draw
    if n_chain > 1:
        var_plus += float(np.var(ary.mean(axis=1), ddof=1))
    if var_plus == 0.0:
        return float(n_chain * n_draw)

    rho = np.zeros(n_draw)
    rho[0] = 1.0
    rho_even = 1.0
    rho_odd = 1.0 - (mean_var - np.mean(acov[:, 1])) / var_plus
    rho[1] = rho_odd

    # initial positive sequence
    t = 1
    while t < n_draw - 2 and rho_even + rho_odd >= 0.0:
        rho_even = 1.0 - (mean_var - np.mean(acov[:, t + 1])) / var_plus
        rho_odd = 1.0 - (mean_var - np.mean(acov[:, t + 2])) / var_plus
        rho[t + 1] = rho_even
        if rho_even + rho_odd >= 0.0:
            rho[t + 2] = rho_odd
        t += 2
    max_t = t

    # initial monotone sequence
    t = 1
    while t <= max_t - 2:
        if rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]:
            rho[t + 1] = (rho[t - 1] + rho[t]) / 2.0
            rho[t + 2] = rho[t + 1]
        t += 2

    tau = -1.0 + 2.0 * np.sum(rho[:max_t]) + np.sum(rho[max_t + 1 : max_t + 2])
    return float(n_chain * n_draw / tau)


def summarize_values(name: str, chains) -> ParameterSummary:
    """Mean, sd and 2.5/50/97.5% quantiles of pooled draws (linear interpolation)."""
    ary = _as_chains(chains)
    pooled = ary.ravel()
    if pooled.size == 0:
        raise InsufficientDrawsError("Cannot summarize an empty draw set.", name)
    q2_5, q50, q97_5 = np.quantile(pooled, [0.025, 0.5, 0.975], method="linear")
    return ParameterSummary(
        name=name,
        mean=float(np.mean(pooled)),
        sd=float(np.std(pooled, ddof=1)) if pooled.size > 1 else 0.0,
        q2_5=float(q2_5),
        q50=float(q50),
        q97_5=float(q97_5),
    )


def summarize(draws, name: str) -> ParameterSummary:
    """Summary of parameter ``name`` from PosteriorDraws, pooled over chains."""
    return summarize_values(name, draws.column(name))


def spectral_radius(phi) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    matrix = np.asarray(phi, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"spectral radius needs a square matrix, got {matrix.shape}")
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(matrix))))


def is_stationary(phi) -> bool:
    """Whether the autoregression driven by ``phi`` is stable."""
    return spectral_radius(phi) < 1.0
