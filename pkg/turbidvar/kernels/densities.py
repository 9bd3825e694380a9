"""
Log densities used by the models.

All functions are pure and return log densities including normalizing
constants. Support violations raise OutOfSupportError rather than
returning -inf, so that callers can tell bad input from a rejection.
"""

import math

import numpy as np
from scipy import special

from turbidvar.core.exceptions import (
    InvalidArgumentError,
    InvalidDegreesOfFreedomError,
    OutOfSupportError,
)
from turbidvar.kernels.linalg import chol_logdet, cholesky, whiten

LOG_2PI = math.log(2.0 * math.pi)


def normal_logpdf(x, mu, sd):
    """Elementwise univariate normal log density."""
    z = (np.asarray(x, dtype=float) - mu) / sd
    return -0.5 * LOG_2PI - np.log(sd) - 0.5 * z * z


def mvn_logpdf_chol(y: np.ndarray, mu: np.ndarray, factor: np.ndarray) -> float:
    """Multivariate normal log density given the Cholesky factor of Sigma."""
    diff = np.asarray(y, dtype=float) - np.asarray(mu, dtype=float)
    z = whiten(factor, diff)
    dim = diff.shape[0]
    return float(-0.5 * dim * LOG_2PI - 0.5 * chol_logdet(factor) - 0.5 * z @ z)


def mvn_logpdf(y: np.ndarray, mu: np.ndarray, sigma: np.ndarray) -> float:
    """
    Multivariate normal log density log N(y; mu, Sigma).

    Raises:
        InvalidArgumentError: If the shapes of y, mu and Sigma disagree
        NotPositiveDefiniteError: If Sigma cannot be factorized
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if y.shape != mu.shape or sigma.shape != (y.shape[0], y.shape[0]):
        raise InvalidArgumentError(
            "Normal density dimensions do not agree.",
            f"y{y.shape}, mu{mu.shape}, Sigma{sigma.shape}",
        )
    return mvn_logpdf_chol(y, mu, cholesky(sigma))


def inv_wishart_logpdf(sigma: np.ndarray, psi: np.ndarray, nu: float) -> float:
    """
    Inverse-Wishart log density with scale Psi and nu degrees of freedom.

    log p = nu/2 log|Psi| - nu*p/2 log 2 - log Gamma_p(nu/2)
            - (nu + p + 1)/2 log|Sigma| - tr(Psi Sigma^{-1}) / 2

    Raises:
        InvalidDegreesOfFreedomError: If nu <= dim - 1
        NotPositiveDefiniteError: If Sigma or Psi is not SPD
    """
    dim = sigma.shape[0]
    if nu <= dim - 1:
        raise InvalidDegreesOfFreedomError(
            "Inverse-Wishart degrees of freedom too small.",
            f"nu={nu} must exceed dim - 1 = {dim - 1}",
        )
    sigma_factor = cholesky(sigma)
    psi_factor = cholesky(psi)
    # tr(Psi Sigma^{-1}) = |L_sigma^{-1} L_psi|_F^2
    cross = whiten(sigma_factor, psi_factor)
    return float(
        0.5 * nu * chol_logdet(psi_factor)
        - 0.5 * nu * dim * math.log(2.0)
        - special.multigammaln(0.5 * nu, dim)
        - 0.5 * (nu + dim + 1) * chol_logdet(sigma_factor)
        - 0.5 * np.sum(cross * cross)
    )


def log_normal_mass(alpha, beta):
    """
    log(Phi(beta) - Phi(alpha)) for standardized bounds alpha < beta.

    Works in the lower tail (reflecting when alpha > 0) so that the
    difference never cancels catastrophically.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    flip = alpha > 0
    lo = np.where(flip, -beta, alpha)
    hi = np.where(flip, -alpha, beta)
    log_hi = special.log_ndtr(hi)
    log_lo = special.log_ndtr(lo)
    with np.errstate(divide="ignore"):
        return log_hi + np.log1p(-np.exp(log_lo - log_hi))


def trunc_normal_logpdf(
    x: float, mu: float, sd: float, lo: float, hi: float = math.inf
) -> float:
    """
    Normal log density truncated to [lo, hi].

    Raises:
        InvalidArgumentError: If lo >= hi or sd <= 0
        OutOfSupportError: If x lies outside [lo, hi]
    """
    if not lo < hi or sd <= 0:
        raise InvalidArgumentError(
            "Invalid truncated normal parameters.",
            f"lo={lo}, hi={hi}, sd={sd}",
        )
    if not lo <= x <= hi:
        raise OutOfSupportError(
            "Value outside the truncated normal support.",
            f"x={x} not in [{lo}, {hi}]",
        )
    log_mass = log_normal_mass((lo - mu) / sd, (hi - mu) / sd)
    return float(normal_logpdf(x, mu, sd) - log_mass)


def beta_logpdf(x: float, a: float, b: float) -> float:
    """
    Beta(a, b) log density.

    Raises:
        InvalidArgumentError: If a or b is not positive
        OutOfSupportError: If x is not in (0, 1)
    """
    if a <= 0 or b <= 0:
        raise InvalidArgumentError(
            "Beta shape parameters must be positive.",
            f"a={a}, b={b}",
        )
    if not 0.0 < x < 1.0:
        raise OutOfSupportError(
            "Value outside the Beta support.",
            f"x={x} not in (0, 1)",
        )
    return float(
        special.xlogy(a - 1.0, x) + special.xlog1py(b - 1.0, -x) - special.betaln(a, b)
    )
