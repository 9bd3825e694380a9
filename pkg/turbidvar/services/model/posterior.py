"""
Joint log posterior of the turbidity models.

For each time t with a likelihood term the observation model is

    Y_t ~ MVN(M_t, Sigma_t)
    M_t = A + sum_j X_jt o beta_j + U_t

with the residual R_k = Y_k - A - sum_j X_jk o beta_j of the completed
(imputed) series and

    ARCH, VAR_IW, VARCH   U_t = Phi R_{t-1}
    VARICH                U_t = R_{t-1} + Phi (R_{t-1} - R_{t-2})

The ARCH family uses Sigma_t = diag(theta1 + theta2 * Y_{t-1}^2) with the
completed lagged observation; VAR_IW uses a constant Sigma. The likelihood
conditions on the first observation (first two for VARICH).

The gradient is propagated by hand through the innovations
E_t = Y_t - M_t, which for all variants take the form C_t - Phi Z_t.
"""

import logging

import numpy as np
from scipy import special

from turbidvar.core.exceptions import LengthMismatchError, TimeIndexOutOfRangeError
from turbidvar.core.models import CovariateRole, ModelSpec, ModelVariant, SiteGroup
from turbidvar.kernels.densities import LOG_2PI, log_normal_mass
from turbidvar.kernels.linalg import chol_inverse, chol_logdet, cholesky, whiten
from turbidvar.kernels.transforms import Support, constrain_with_derivatives
from turbidvar.services.model.dataset import Dataset
from turbidvar.services.model.layout import (
    POSITIVE,
    UNIT_INTERVAL,
    ModelLayout,
    ParameterSet,
)

logger = logging.getLogger(__name__)


# =============================================================================
# Building blocks shared with simulation and reporting
# =============================================================================


def complete_data(params: ParameterSet, data: Dataset) -> np.ndarray:
    """
    Responses with missing entries replaced by the imputed values.

    Raises:
        LengthMismatchError: If y_missing does not match the mask count
    """
    y_missing = params.missing_values()
    if y_missing.shape != (data.n_missing,):
        raise LengthMismatchError(
            "Imputed values do not match the missing mask.",
            f"expected {data.n_missing}, got {y_missing.shape[0]}",
        )
    completed = np.array(data.Y, dtype=float)
    completed[data.mask] = y_missing
    return completed


def covariate_effect(params: ParameterSet, X: np.ndarray) -> np.ndarray:
    """sum_j X_j o beta_j for every row of X (P x T x S) -> T x S."""
    if X.shape[0] == 0:
        return np.zeros(X.shape[1:])
    return np.einsum("pts,ps->ts", X, params.beta)


def residuals(params: ParameterSet, completed: np.ndarray, X: np.ndarray) -> np.ndarray:
    """R = Y - A - sum_j X_j o beta_j."""
    return completed - params.A - covariate_effect(params, X)


def _check_time(spec: ModelSpec, t: int, n_times: int) -> None:
    first = spec.variant.first_likelihood_index
    if not first <= t < n_times:
        raise TimeIndexOutOfRangeError(
            "Time index has too few lags or lies beyond the series.",
            f"t={t} outside [{first}, {n_times}) for {spec.variant.value}",
        )


def conditional_mean(
    params: ParameterSet,
    spec: ModelSpec,
    completed: np.ndarray,
    X: np.ndarray,
    t: int,
) -> np.ndarray:
    """
    Process mean M_t at 0-based time t.

    Only rows before t of ``completed`` are read, so the row at t may be
    unfilled during simulation.

    Raises:
        TimeIndexOutOfRangeError: If t < 1 (t < 2 for VARICH) or t >= T
    """
    _check_time(spec, t, completed.shape[0])

    def residual(k: int) -> np.ndarray:
        return completed[k] - params.A - covariate_effect(params, X[:, k : k + 1])[0]

    base = params.A + covariate_effect(params, X[:, t : t + 1])[0]
    lagged = residual(t - 1)
    if spec.variant is ModelVariant.VARICH:
        return base + lagged + params.Phi @ (lagged - residual(t - 2))
    return base + params.Phi @ lagged


def conditional_variance(
    params: ParameterSet,
    spec: ModelSpec,
    completed: np.ndarray,
    t: int,
) -> np.ndarray:
    """
    Error covariance Sigma_t at 0-based time t.

    Raises:
        TimeIndexOutOfRangeError: As for ``conditional_mean``
    """
    _check_time(spec, t, completed.shape[0])
    if spec.variant is ModelVariant.VAR_IW:
        return np.array(params.Sigma, dtype=float)
    return np.diag(params.theta1 + params.theta2 * completed[t - 1] ** 2)


def innovations(
    params: ParameterSet, spec: ModelSpec, completed: np.ndarray, X: np.ndarray
) -> np.ndarray:
    """E_t = Y_t - M_t for every likelihood row (t >= t0), shape (T - t0) x S."""
    r = residuals(params, completed, X)
    if spec.variant is ModelVariant.VARICH:
        r = np.diff(r, axis=0)
    if r.shape[0] < 2:
        return np.zeros((0, completed.shape[1]))
    return r[1:] - r[:-1] @ params.Phi.T


def predictive_means(
    params: ParameterSet, spec: ModelSpec, completed: np.ndarray, X: np.ndarray
) -> np.ndarray:
    """M_t for every likelihood row, shape (T - t0) x S."""
    first = spec.variant.first_likelihood_index
    return completed[first:] - innovations(params, spec, completed, X)


def variance_rows(
    params: ParameterSet, spec: ModelSpec, completed: np.ndarray
) -> np.ndarray:
    """Diagonal variances for every likelihood row of an ARCH-family model."""
    first = spec.variant.first_likelihood_index
    lagged = completed[first - 1 : -1]
    return params.theta1 + params.theta2 * lagged**2


# =============================================================================
# Prior scales
# =============================================================================


def effect_prior_sd(spec: ModelSpec, data: Dataset) -> np.ndarray:
    """
    P x S prior sds of beta.

    An operation effect gets the wide prior only at sites of the matching
    group: dumping at dump sites, dredging at dredging sites.
    """
    priors = spec.priors
    if len(spec.covariate_roles) != data.n_covariates:
        raise LengthMismatchError(
            "Every covariate needs a role.",
            f"{len(spec.covariate_roles)} roles for {data.n_covariates} covariates",
        )
    groups = np.array([g.value for g in data.site_groups])
    sd = np.empty((data.n_covariates, data.n_sites))
    for j, role in enumerate(spec.covariate_roles):
        if role is CovariateRole.WIND:
            sd[j] = priors.sd_beta_wind
            continue
        active_group = (
            SiteGroup.DUMP_SITE if role is CovariateRole.DUMPING else SiteGroup.DREDGING_SITE
        )
        sd[j] = np.where(
            groups == active_group.value,
            priors.sd_effect_active,
            priors.sd_effect_inactive,
        )
    return sd


def phi_prior_sd(spec: ModelSpec, n_sites: int) -> np.ndarray:
    """Prior sds of the packed Phi block."""
    priors = spec.priors
    if not spec.variant.has_full_phi:
        return np.full(n_sites, priors.sd_phi_diag)
    sd = np.full((n_sites, n_sites), priors.sd_phi_offdiag)
    np.fill_diagonal(sd, priors.sd_phi_diag)
    return sd.ravel()


# =============================================================================
# Posterior
# =============================================================================


class TurbidityPosterior:
    """
    Log posterior over the packed unconstrained vector.

    Implements the LogDensity protocol. Instances are immutable after
    construction and safe to evaluate from several threads.

    Usage:
        posterior = TurbidityPosterior(spec, data)
        lp, grad = posterior.log_density_and_gradient(u)
    """

    def __init__(self, spec: ModelSpec, data: Dataset):
        """
        Args:
            spec: Model variant and priors
            data: Dataset to condition on

        Raises:
            ValueError: If priors are inconsistent with the number of sites
        """
        spec.priors.check_sites(data.n_sites)
        self.spec = spec
        self.data = data
        self.layout = ModelLayout(spec, data)
        priors = spec.priors

        self._beta_sd = effect_prior_sd(spec, data)
        self._phi_sd = phi_prior_sd(spec, data.n_sites)
        self._psi = priors.psi_matrix(data.n_sites)
        self._psi_factor = cholesky(self._psi)
        self._y_template = np.nan_to_num(np.array(data.Y, dtype=float))
        self._mask = np.array(data.mask)
        self._X = np.array(data.X)

        self._theta1_log_mass = float(
            log_normal_mass((0.0 - priors.theta1_mean) / priors.theta1_sd, np.inf)
        )
        self._missing_log_mass = float(
            log_normal_mass(
                (priors.missing_lower - priors.missing_mean) / priors.missing_sd,
                (priors.missing_upper - priors.missing_mean) / priors.missing_sd,
            )
        )
        self._theta2_log_norm = float(special.betaln(priors.theta2_a, priors.theta2_b))
        self._iw_const = float(
            0.5 * priors.nu * chol_logdet(self._psi_factor)
            - 0.5 * priors.nu * data.n_sites * np.log(2.0)
            - special.multigammaln(0.5 * priors.nu, data.n_sites)
        )
        logger.debug(
            f"Posterior for {spec.variant.value}: S={data.n_sites}, T={data.n_times}, "
            f"P={data.n_covariates}, missing={data.n_missing}, dim={self.dimension}"
        )

    @property
    def dimension(self) -> int:
        return self.layout.dimension

    @property
    def parameter_names(self) -> list[str]:
        return self.layout.names

    def constrain(self, u: np.ndarray) -> np.ndarray:
        return self.layout.constrain(u)

    def log_density(self, u: np.ndarray) -> float:
        return self.log_density_and_gradient(u)[0]

    def log_density_and_gradient(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        """
        Log posterior (prior + likelihood + log Jacobians) and its gradient.

        Raises:
            LengthMismatchError: If u has the wrong length

        Returns:
            (log density, gradient); non-finite densities come back as
            (-inf, zeros)
        """
        layout = self.layout
        u = layout.check_length(u)
        with np.errstate(all="ignore"):
            lp, grad = self._evaluate(u)
        if not np.isfinite(lp) or not np.all(np.isfinite(grad)):
            return -np.inf, np.zeros_like(u)
        return lp, grad

    def _evaluate(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        layout = self.layout
        spec = self.spec
        priors = spec.priors
        variant = spec.variant
        s, p = layout.n_sites, layout.n_covariates
        grad = np.zeros_like(u)
        lp = 0.0

        # --- unpack -----------------------------------------------------------
        a = layout.block(u, "A")
        beta = layout.block(u, "beta").reshape(p, s)
        phi_block = layout.block(u, "Phi")
        phi = layout.phi_matrix(phi_block)

        missing_support: Support = layout.missing_support
        y_missing, dy_missing, lj_missing, dlj_missing = constrain_with_derivatives(
            layout.block(u, "y_missing"), missing_support
        )
        completed = self._y_template.copy()
        completed[self._mask] = y_missing
        lp += float(np.sum(lj_missing))

        theta1 = theta2 = None
        factor = None
        if variant.has_arch_variance:
            theta1, dtheta1, lj1, dlj1 = constrain_with_derivatives(
                layout.block(u, "theta1"), POSITIVE
            )
            theta2, dtheta2, lj2, dlj2 = constrain_with_derivatives(
                layout.block(u, "theta2"), UNIT_INTERVAL
            )
            lp += float(np.sum(lj1) + np.sum(lj2))
        else:
            sigma_block = layout.block(u, "Sigma")
            factor = layout.cholesky_from_block(sigma_block)
            lj_sigma, dlj_sigma = layout.sigma_log_jacobian(sigma_block)
            lp += lj_sigma

        # --- likelihood -------------------------------------------------------
        xb = np.einsum("pts,ps->ts", self._X, beta) if p else 0.0
        r = completed - a - xb
        if variant is ModelVariant.VARICH:
            driver = np.diff(r, axis=0)
        else:
            driver = r
        first = variant.first_likelihood_index

        g_completed = np.zeros_like(completed)
        g_a = np.zeros(s)
        g_beta = np.zeros((p, s))
        g_phi = np.zeros((s, s))
        g_theta1 = np.zeros(s)
        g_theta2 = np.zeros(s)
        g_sigma = np.zeros((s, s))

        if driver.shape[0] >= 2:
            current, lagged = driver[1:], driver[:-1]
            e = current - lagged @ phi.T
            n_rows = e.shape[0]

            if variant.has_arch_variance:
                y_lag = completed[first - 1 : -1]
                var = theta1 + theta2 * y_lag**2
                lp += float(np.sum(-0.5 * LOG_2PI - 0.5 * np.log(var) - 0.5 * e**2 / var))
                g_e = -e / var
                g_var = -0.5 / var + 0.5 * e**2 / var**2
                g_theta1 += g_var.sum(axis=0)
                g_theta2 += (g_var * y_lag**2).sum(axis=0)
                g_completed[first - 1 : -1] += g_var * 2.0 * theta2 * y_lag
            else:
                z = whiten(factor, e.T)
                lp += float(
                    -0.5 * n_rows * s * LOG_2PI
                    - 0.5 * n_rows * chol_logdet(factor)
                    - 0.5 * np.sum(z * z)
                )
                sigma_inv = chol_inverse(factor)
                g_e = -e @ sigma_inv
                scatter = e.T @ e
                g_sigma += -0.5 * n_rows * sigma_inv + 0.5 * sigma_inv @ scatter @ sigma_inv

            # E = C - Z Phi^T
            g_phi -= g_e.T @ lagged
            g_driver = np.zeros_like(driver)
            g_driver[1:] += g_e
            g_driver[:-1] -= g_e @ phi
            if variant is ModelVariant.VARICH:
                g_r = np.zeros_like(r)
                g_r[1:] += g_driver
                g_r[:-1] -= g_driver
            else:
                g_r = g_driver
            g_a -= g_r.sum(axis=0)
            if p:
                g_beta -= np.einsum("pts,ts->ps", self._X, g_r)
            g_completed += g_r

        # --- priors -----------------------------------------------------------
        lp += float(np.sum(-0.5 * LOG_2PI - np.log(priors.sd_A) - 0.5 * (a / priors.sd_A) ** 2))
        g_a -= a / priors.sd_A**2

        if p:
            lp += float(
                np.sum(-0.5 * LOG_2PI - np.log(self._beta_sd) - 0.5 * (beta / self._beta_sd) ** 2)
            )
            g_beta -= beta / self._beta_sd**2

        lp += float(
            np.sum(
                -0.5 * LOG_2PI - np.log(self._phi_sd) - 0.5 * (phi_block / self._phi_sd) ** 2
            )
        )
        g_phi_block = -phi_block / self._phi_sd**2

        if variant.has_arch_variance:
            z1 = (theta1 - priors.theta1_mean) / priors.theta1_sd
            lp += float(
                np.sum(-0.5 * LOG_2PI - np.log(priors.theta1_sd) - 0.5 * z1**2)
                - s * self._theta1_log_mass
            )
            g_theta1 -= z1 / priors.theta1_sd
            lp += float(
                np.sum(
                    special.xlogy(priors.theta2_a - 1.0, theta2)
                    + special.xlog1py(priors.theta2_b - 1.0, -theta2)
                )
                - s * self._theta2_log_norm
            )
            g_theta2 += (priors.theta2_a - 1.0) / theta2 - (priors.theta2_b - 1.0) / (
                1.0 - theta2
            )
        else:
            sigma_inv = chol_inverse(factor)
            cross = whiten(factor, self._psi_factor)
            lp += float(
                self._iw_const
                - 0.5 * (priors.nu + s + 1) * chol_logdet(factor)
                - 0.5 * np.sum(cross * cross)
            )
            g_sigma += -0.5 * (priors.nu + s + 1) * sigma_inv + 0.5 * (
                sigma_inv @ self._psi @ sigma_inv
            )

        if layout.n_missing:
            zm = (y_missing - priors.missing_mean) / priors.missing_sd
            lp += float(
                np.sum(-0.5 * LOG_2PI - np.log(priors.missing_sd) - 0.5 * zm**2)
                - layout.n_missing * self._missing_log_mass
            )
            g_missing = g_completed[self._mask] - zm / priors.missing_sd
        else:
            g_missing = np.zeros(0)

        # --- chain rule into u ------------------------------------------------
        grad[layout.blocks["A"].span] = g_a
        grad[layout.blocks["beta"].span] = g_beta.ravel()
        if variant.has_full_phi:
            g_phi_block = g_phi_block + g_phi.ravel()
        else:
            g_phi_block = g_phi_block + np.diag(g_phi)
        grad[layout.blocks["Phi"].span] = g_phi_block
        if variant.has_arch_variance:
            grad[layout.blocks["theta1"].span] = g_theta1 * dtheta1 + dlj1
            grad[layout.blocks["theta2"].span] = g_theta2 * dtheta2 + dlj2
        else:
            # Sigma = L L^T  =>  df/dL = 2 G L (lower triangle)
            g_factor = np.tril(2.0 * g_sigma @ factor)
            diag = np.arange(s)
            g_factor[diag, diag] *= factor[diag, diag]
            tril = np.tril_indices(s)
            grad[layout.blocks["Sigma"].span] = g_factor[tril] + dlj_sigma
        grad[layout.blocks["y_missing"].span] = g_missing * dy_missing + dlj_missing
        return lp, grad


def log_posterior(u: np.ndarray, spec: ModelSpec, data: Dataset) -> float:
    """Log posterior at u; see ``TurbidityPosterior``."""
    return TurbidityPosterior(spec, data).log_density(u)


def grad_log_posterior(u: np.ndarray, spec: ModelSpec, data: Dataset) -> np.ndarray:
    """Analytic gradient of ``log_posterior`` with respect to u."""
    return TurbidityPosterior(spec, data).log_density_and_gradient(u)[1]
