"""
Synthetic data from the turbidity models.

``simulate`` runs the conditional mean and variance recursions forward
from known parameters; ``inject_missing`` punches gaps into a dataset.
"""

import logging
from collections.abc import Sequence

import numpy as np

from turbidvar.core.exceptions import SimulationError
from turbidvar.core.models import MissingBlock, ModelSpec, SiteGroup
from turbidvar.services.model.dataset import Dataset
from turbidvar.services.model.layout import ParameterSet
from turbidvar.services.model.posterior import (
    conditional_mean,
    conditional_variance,
    covariate_effect,
)

logger = logging.getLogger(__name__)

DEFAULT_START_DATE = "2017-08-31"
DEFAULT_COVARIATE_NAMES = ("dumping", "dredging", "wind_knots")


def simulate(
    spec: ModelSpec,
    params: ParameterSet,
    n_times: int,
    covariates: np.ndarray,
    seed: int,
    sites: Sequence[str] | None = None,
    site_groups: Sequence[SiteGroup] | None = None,
    covariate_names: Sequence[str] | None = None,
    start_date: str = DEFAULT_START_DATE,
) -> Dataset:
    """
    Generate a fully observed dataset.

    The first row (first two for VARICH) is drawn from
    N(A + sum_j X_j o beta_j, D) with D = diag(theta1), or diag(Sigma) for
    VAR_IW; later rows follow the model recursion exactly.

    Args:
        spec: Model specification
        params: True parameters
        n_times: Number of days T
        covariates: P x T x S covariate array
        seed: Random seed
        sites: Site names, "site-1".. when None
        site_groups: Site groups, all DredgingSite when None
        covariate_names: Covariate names, the standard three when None
        start_date: First date of the series

    Raises:
        ConstraintViolationError: If params violate their constraints
        SimulationError: If shapes are inconsistent
    """
    X = np.asarray(covariates, dtype=float)
    if X.ndim != 3 or X.shape[1] != n_times:
        raise SimulationError(
            "Covariates must be a P x T x S array.",
            f"got {X.shape} for T={n_times}",
        )
    n_covariates, _, n_sites = X.shape
    params.validate(spec.variant, n_sites, n_covariates)
    first = spec.variant.first_likelihood_index
    if n_times < first:
        raise SimulationError(
            "Series too short for the model's lags.", f"T={n_times}, need >= {first}"
        )

    rng = np.random.default_rng(seed)
    y = np.zeros((n_times, n_sites))
    if spec.variant.has_arch_variance:
        initial_sd = np.sqrt(params.theta1)
    else:
        initial_sd = np.sqrt(np.diag(params.Sigma))
    baseline = params.A + covariate_effect(params, X[:, :first])
    y[:first] = baseline + initial_sd * rng.standard_normal((first, n_sites))

    for t in range(first, n_times):
        mean = conditional_mean(params, spec, y, X, t)
        cov = conditional_variance(params, spec, y, t)
        if spec.variant.has_arch_variance:
            y[t] = mean + np.sqrt(np.diag(cov)) * rng.standard_normal(n_sites)
        else:
            y[t] = rng.multivariate_normal(mean, cov, method="cholesky")
    if not np.all(np.isfinite(y)):
        raise SimulationError(
            "Simulated series diverged.", f"non-finite values for {spec.variant.value}"
        )

    if covariate_names is None:
        covariate_names = DEFAULT_COVARIATE_NAMES[:n_covariates]
        if n_covariates > len(DEFAULT_COVARIATE_NAMES):
            covariate_names = tuple(f"x{j + 1}" for j in range(n_covariates))
    dates = np.datetime64(start_date, "D") + np.arange(n_times)
    logger.debug(f"Simulated {spec.variant.value}: T={n_times}, S={n_sites}, seed={seed}")
    return Dataset(
        Y=y,
        mask=np.zeros_like(y, dtype=bool),
        X=X,
        covariate_names=tuple(covariate_names),
        sites=tuple(sites) if sites else tuple(f"site-{s + 1}" for s in range(n_sites)),
        site_groups=(
            tuple(site_groups) if site_groups else (SiteGroup.DREDGING_SITE,) * n_sites
        ),
        dates=dates,
    )


def inject_missing(
    data: Dataset,
    fraction: float = 0.0,
    blocks: Sequence[MissingBlock] = (),
    seed: int = 0,
) -> Dataset:
    """
    Mask entries of a dataset.

    ``fraction`` masks round(fraction * observed) currently observed cells
    chosen uniformly without replacement; each block masks ``length``
    consecutive days at one site. Covariates are untouched.

    Raises:
        SimulationError: If fraction is outside [0, 1) or a block does not fit
    """
    if not 0.0 <= fraction < 1.0:
        raise SimulationError(
            "Missing fraction must lie in [0, 1).", f"fraction={fraction}"
        )
    mask = np.zeros_like(data.mask)
    for block in blocks:
        if block.site >= data.n_sites or block.start + block.length > data.n_times:
            raise SimulationError(
                "Missing block lies outside the dataset.",
                f"{block} for T={data.n_times}, S={data.n_sites}",
            )
        mask[block.start : block.start + block.length, block.site] = True

    if fraction > 0.0:
        rng = np.random.default_rng(seed)
        observed = np.flatnonzero(~(data.mask | mask))
        n_drop = int(round(fraction * observed.size))
        chosen = rng.choice(observed, size=n_drop, replace=False)
        mask.flat[chosen] = True

    if not mask.any():
        return data
    logger.debug(f"Masked {int(mask.sum())} entries ({len(blocks)} blocks)")
    return data.with_mask(mask)

