"""
Tests for the dataset container, parameter layout and log posterior.

Tests cover:
- Completing data with imputed values
- Conditional means and variances on hand-worked examples
- Packing and naming of parameters for every variant
- The vectorized log posterior against a per-time-step scipy oracle
  evaluated on explicitly constructed parameters
- Site relabelling, nested variants and the no-dynamics limit
"""

import math

import numpy as np
import pytest
from scipy import special, stats

from tests.conftest import ALL_VARIANTS, draws_from_params, make_dataset, random_unconstrained
from turbidvar.core.exceptions import (
    ConstraintViolationError,
    InvalidDatasetError,
    LengthMismatchError,
    TimeIndexOutOfRangeError,
)
from turbidvar.core.models import (
    ModelSpec,
    ModelVariant,
    PriorConfig,
    SiteGroup,
)
from turbidvar.services.model.dataset import Dataset
from turbidvar.services.model.layout import ModelLayout, ParameterSet
from turbidvar.services.model.posterior import (
    TurbidityPosterior,
    complete_data,
    conditional_mean,
    conditional_variance,
    effect_prior_sd,
    innovations,
    log_posterior,
    predictive_means,
)
from turbidvar.services.report.criteria import pointwise_loglik


def _series(values: list[float]) -> Dataset:
    """One site, no covariates."""
    y = np.array(values, dtype=float).reshape(-1, 1)
    return Dataset(
        Y=y,
        mask=np.isnan(y),
        X=np.zeros((0, len(values), 1)),
        covariate_names=(),
        sites=("s1",),
        site_groups=(SiteGroup.DUMP_SITE,),
        dates=np.datetime64("2021-03-01") + np.arange(len(values)),
    )


def _params(phi: float, y_missing: list[float] = ()) -> ParameterSet:
    return ParameterSet(
        A=np.zeros(1),
        beta=np.zeros((0, 1)),
        Phi=np.array([[phi]]),
        theta1=np.array([1.0]),
        theta2=np.array([0.5]),
        y_missing=np.array(y_missing, dtype=float),
    )


def random_params(
    variant: ModelVariant, n_sites: int, n_covariates: int, n_missing: int, seed: int
) -> ParameterSet:
    """Interior parameter values drawn directly in constrained space."""
    rng = np.random.default_rng(seed)
    phi = rng.uniform(-0.3, 0.3, (n_sites, n_sites))
    if not variant.has_full_phi:
        phi = np.diag(np.diag(phi))
    theta1 = theta2 = sigma = None
    if variant.has_arch_variance:
        theta1 = np.exp(rng.uniform(-0.5, 1.0, n_sites))
        theta2 = rng.uniform(0.2, 0.8, n_sites)
    else:
        m = rng.normal(0.0, 0.5, (n_sites, n_sites))
        sigma = m @ m.T + np.eye(n_sites)
    return ParameterSet(
        A=10.0 + rng.uniform(-1.0, 1.0, n_sites),
        beta=rng.uniform(-0.5, 0.5, (n_covariates, n_sites)),
        Phi=phi,
        theta1=theta1,
        theta2=theta2,
        Sigma=sigma,
        y_missing=rng.uniform(5.0, 95.0, n_missing),
    )


def pack_by_hand(params: ParameterSet, variant: ModelVariant, priors: PriorConfig) -> np.ndarray:
    """Unconstrained vector built entry by entry: A, beta, Phi, theta or Sigma, y_missing."""
    n_sites = params.A.shape[0]
    u = list(params.A)
    u += [params.beta[j, s] for j in range(params.beta.shape[0]) for s in range(n_sites)]
    if variant.has_full_phi:
        u += [params.Phi[i, k] for i in range(n_sites) for k in range(n_sites)]
    else:
        u += [params.Phi[i, i] for i in range(n_sites)]
    if variant.has_arch_variance:
        u += [math.log(v) for v in params.theta1]
        u += [math.log(v / (1.0 - v)) for v in params.theta2]
    else:
        factor = np.linalg.cholesky(params.Sigma)
        for i in range(n_sites):
            for k in range(i + 1):
                u.append(math.log(factor[i, i]) if i == k else factor[i, k])
    lo, hi = priors.missing_lower, priors.missing_upper
    for value in params.missing_values():
        p = (value - lo) / (hi - lo)
        u.append(math.log(p / (1.0 - p)))
    return np.array(u, dtype=float)


def sigma_log_jacobian(sigma: np.ndarray) -> float:
    """log |d Sigma / d u| for the log-diagonal Cholesky parameterization."""
    n_sites = sigma.shape[0]
    factor = np.linalg.cholesky(sigma)
    # 0-based row i: exponent S - i from d Sigma / d L, plus one from L_ii = exp(u)
    return n_sites * math.log(2.0) + sum(
        (n_sites - i + 1) * math.log(factor[i, i]) for i in range(n_sites)
    )


def reference_log_posterior(params: ParameterSet, spec: ModelSpec, data: Dataset) -> float:
    """Log posterior written one time step at a time with scipy densities."""
    priors = spec.priors
    variant = spec.variant
    n_times, n_sites = data.n_times, data.n_sites

    completed = np.array(data.Y, dtype=float)
    completed[data.mask] = params.y_missing

    def residual(k: int) -> np.ndarray:
        effect = sum(data.X[j, k] * params.beta[j] for j in range(data.n_covariates))
        return completed[k] - params.A - effect

    lp = 0.0
    for t in range(variant.first_likelihood_index, n_times):
        base = completed[t] - residual(t)
        if variant is ModelVariant.VARICH:
            mean = base + residual(t - 1) + params.Phi @ (residual(t - 1) - residual(t - 2))
        else:
            mean = base + params.Phi @ residual(t - 1)
        if variant is ModelVariant.VAR_IW:
            cov = params.Sigma
        else:
            cov = np.diag(params.theta1 + params.theta2 * completed[t - 1] ** 2)
        lp += stats.multivariate_normal.logpdf(completed[t], mean, cov)

    lp += stats.norm.logpdf(params.A, 0.0, priors.sd_A).sum()
    for j, role in enumerate(spec.covariate_roles):
        for s, group in enumerate(data.site_groups):
            if role.value == "wind":
                sd = priors.sd_beta_wind
            elif (role.value == "dumping") == (group is SiteGroup.DUMP_SITE):
                sd = priors.sd_effect_active
            else:
                sd = priors.sd_effect_inactive
            lp += stats.norm.logpdf(params.beta[j, s], 0.0, sd)
    for i in range(n_sites):
        for k in range(n_sites):
            if i == k:
                lp += stats.norm.logpdf(params.Phi[i, k], 0.0, priors.sd_phi_diag)
            elif variant.has_full_phi:
                lp += stats.norm.logpdf(params.Phi[i, k], 0.0, priors.sd_phi_offdiag)

    if variant.has_arch_variance:
        a = (0.0 - priors.theta1_mean) / priors.theta1_sd
        lp += stats.truncnorm.logpdf(
            params.theta1, a, np.inf, loc=priors.theta1_mean, scale=priors.theta1_sd
        ).sum()
        lp += stats.beta.logpdf(params.theta2, priors.theta2_a, priors.theta2_b).sum()
        lp += np.log(params.theta1).sum()
        lp += np.log(params.theta2 * (1.0 - params.theta2)).sum()
    else:
        lp += stats.invwishart.logpdf(params.Sigma, df=priors.nu, scale=np.eye(n_sites))
        lp += sigma_log_jacobian(params.Sigma)

    lo, hi = priors.missing_lower, priors.missing_upper
    for value in params.missing_values():
        lp += stats.truncnorm.logpdf(
            value,
            (lo - priors.missing_mean) / priors.missing_sd,
            (hi - priors.missing_mean) / priors.missing_sd,
            loc=priors.missing_mean,
            scale=priors.missing_sd,
        )
        p = (value - lo) / (hi - lo)
        lp += math.log((hi - lo) * p * (1.0 - p))
    return float(lp)


class TestDataset:
    """Tests for the Dataset container."""

    def test_missing_entries_are_nan(self, small_dataset: Dataset) -> None:
        mask = np.zeros_like(small_dataset.mask)
        mask[2, 1] = True
        masked = small_dataset.with_mask(mask)
        assert masked.n_missing == 1
        assert np.isnan(masked.Y[2, 1])
        np.testing.assert_array_equal(masked.missing_index, [[2, 1]])

    def test_arrays_are_read_only(self, small_dataset: Dataset) -> None:
        with pytest.raises(ValueError):
            small_dataset.Y[0, 0] = 1.0

    def test_rejects_gaps_in_dates(self) -> None:
        with pytest.raises(InvalidDatasetError):
            Dataset(
                Y=np.ones((2, 1)),
                mask=np.zeros((2, 1), dtype=bool),
                X=np.zeros((0, 2, 1)),
                covariate_names=(),
                sites=("a",),
                site_groups=(SiteGroup.DUMP_SITE,),
                dates=np.array(["2020-01-01", "2020-01-03"], dtype="datetime64[D]"),
            )

    def test_rejects_non_finite_covariates(self) -> None:
        x = np.zeros((1, 3, 1))
        x[0, 1, 0] = np.nan
        with pytest.raises(InvalidDatasetError):
            Dataset(
                Y=np.ones((3, 1)),
                mask=np.zeros((3, 1), dtype=bool),
                X=x,
                covariate_names=("wind_knots",),
                sites=("a",),
                site_groups=(SiteGroup.DUMP_SITE,),
                dates=np.datetime64("2020-01-01") + np.arange(3),
            )

    def test_too_short_to_fit(self) -> None:
        with pytest.raises(InvalidDatasetError):
            _series([1.0, 2.0]).check_fittable()

    def test_equals_is_nan_aware(self) -> None:
        assert _series([1.0, np.nan, 3.0]).equals(_series([1.0, np.nan, 3.0]))
        assert not _series([1.0, np.nan, 3.0]).equals(_series([1.0, 2.0, 3.0]))


class TestConditionalMoments:
    """Hand-worked conditional means and variances."""

    def test_complete_data(self) -> None:
        """Y = [1, NA, 3] with y_missing = [2] completes to [1, 2, 3]."""
        completed = complete_data(_params(0.0, [2.0]), _series([1.0, np.nan, 3.0]))
        np.testing.assert_array_equal(completed.ravel(), [1.0, 2.0, 3.0])

    def test_complete_data_length_mismatch(self) -> None:
        with pytest.raises(LengthMismatchError):
            complete_data(_params(0.0, [2.0, 3.0]), _series([1.0, np.nan, 3.0]))

    def test_var_mean(self) -> None:
        """A = 0, Phi = 2, Y_0 = 1: M_1 = 2."""
        spec = ModelSpec(variant=ModelVariant.VARCH)
        completed = np.array([[1.0], [2.0], [3.0]])
        mean = conditional_mean(_params(2.0), spec, completed, np.zeros((0, 3, 1)), 1)
        np.testing.assert_allclose(mean, [2.0])

    def test_differenced_mean(self) -> None:
        """VARICH with Phi = 3 on [1, 2, 3]: M_2 = 2 + 3 * (2 - 1) = 5."""
        spec = ModelSpec(variant=ModelVariant.VARICH)
        completed = np.array([[1.0], [2.0], [3.0]])
        mean = conditional_mean(_params(3.0), spec, completed, np.zeros((0, 3, 1)), 2)
        np.testing.assert_allclose(mean, [5.0])

    def test_arch_variance(self) -> None:
        """theta1 = 1, theta2 = 0.5, Y_{t-1} = 2: variance 3."""
        spec = ModelSpec(variant=ModelVariant.ARCH)
        completed = np.array([[2.0], [5.0]])
        variance = conditional_variance(_params(0.0), spec, completed, 1)
        np.testing.assert_allclose(variance, [[3.0]])

    def test_time_index_out_of_range(self) -> None:
        completed = np.ones((3, 1))
        x = np.zeros((0, 3, 1))
        with pytest.raises(TimeIndexOutOfRangeError):
            conditional_mean(_params(0.5), ModelSpec(variant=ModelVariant.ARCH), completed, x, 0)
        with pytest.raises(TimeIndexOutOfRangeError):
            conditional_mean(
                _params(0.5), ModelSpec(variant=ModelVariant.VARICH), completed, x, 1
            )
        with pytest.raises(TimeIndexOutOfRangeError):
            conditional_variance(_params(0.5), ModelSpec(variant=ModelVariant.ARCH), completed, 3)

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_vectorized_means_match_pointwise(self, variant: ModelVariant) -> None:
        """predictive_means agrees with conditional_mean at every t."""
        data = make_dataset(n_times=8, n_sites=3, seed=4)
        spec = ModelSpec(variant=variant)
        layout = ModelLayout(spec, data)
        params = layout.params_from_unconstrained(random_unconstrained(layout, seed=9))
        completed = complete_data(params, data)
        rows = predictive_means(params, spec, completed, data.X)
        first = variant.first_likelihood_index
        assert rows.shape == (data.n_times - first, 3)
        for t in range(first, data.n_times):
            expected = conditional_mean(params, spec, completed, data.X, t)
            np.testing.assert_allclose(rows[t - first], expected, atol=1e-12)
        np.testing.assert_allclose(
            innovations(params, spec, completed, data.X), completed[first:] - rows, atol=1e-12
        )


class TestEffectPriors:
    """Tests for the site-group split of effect priors."""

    def test_operation_priors_follow_site_groups(self, small_dataset: Dataset) -> None:
        spec = ModelSpec(variant=ModelVariant.VARCH)
        sd = effect_prior_sd(spec, small_dataset)
        # site 1 dredges, site 2 receives dumped material
        np.testing.assert_allclose(sd[0], [0.3, 25.0])
        np.testing.assert_allclose(sd[1], [25.0, 0.3])
        np.testing.assert_allclose(sd[2], [1.0, 1.0])

    def test_role_count_must_match(self, small_dataset: Dataset) -> None:
        spec = ModelSpec(variant=ModelVariant.ARCH, covariate_roles=("wind",))
        with pytest.raises(LengthMismatchError):
            effect_prior_sd(spec, small_dataset)


class TestModelLayout:
    """Tests for ModelLayout."""

    @pytest.mark.parametrize(
        "variant,dimension",
        [
            (ModelVariant.ARCH, 2 + 6 + 2 + 2 + 2),
            (ModelVariant.VAR_IW, 2 + 6 + 4 + 3),
            (ModelVariant.VARCH, 2 + 6 + 4 + 2 + 2),
            (ModelVariant.VARICH, 2 + 6 + 4 + 2 + 2),
        ],
    )
    def test_dimension(self, small_dataset: Dataset, variant: ModelVariant, dimension: int) -> None:
        layout = ModelLayout(ModelSpec(variant=variant), small_dataset)
        assert layout.dimension == dimension
        assert len(layout.names) == dimension

    def test_missing_values_extend_the_layout(self, small_dataset: Dataset) -> None:
        mask = np.zeros_like(small_dataset.mask)
        mask[1, 0] = mask[3, 1] = True
        layout = ModelLayout(ModelSpec(variant=ModelVariant.ARCH), small_dataset.with_mask(mask))
        assert layout.dimension == 16
        assert layout.names[-2:] == ["y_missing[1]", "y_missing[2]"]

    def test_names(self, small_dataset: Dataset) -> None:
        layout = ModelLayout(ModelSpec(variant=ModelVariant.VAR_IW), small_dataset)
        assert layout.names[:4] == ["A[1]", "A[2]", "beta[1,1]", "beta[1,2]"]
        assert layout.phi_names() == ["Phi[1,1]", "Phi[1,2]", "Phi[2,1]", "Phi[2,2]"]
        assert layout.names[-3:] == ["Sigma[1,1]", "Sigma[2,1]", "Sigma[2,2]"]

    def test_arch_names_are_diagonal(self, small_dataset: Dataset) -> None:
        layout = ModelLayout(ModelSpec(variant=ModelVariant.ARCH), small_dataset)
        assert layout.phi_names() == ["Phi[1,1]", "Phi[2,2]"]
        assert "theta2[2]" in layout.names

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_unconstrain_inverts_constrain(self, variant: ModelVariant) -> None:
        data = make_dataset(n_times=6, n_sites=3, seed=2, missing_fraction=0.2)
        layout = ModelLayout(ModelSpec(variant=variant), data)
        u = random_unconstrained(layout, seed=3)
        params = layout.params_from_unconstrained(u)
        np.testing.assert_allclose(layout.unconstrain(params), u, atol=1e-10)
        values = layout.constrained_vector(params)
        again = layout.params_from_constrained(values)
        np.testing.assert_allclose(layout.constrained_vector(again), values, atol=1e-12)

    def test_wrong_length(self, small_dataset: Dataset) -> None:
        layout = ModelLayout(ModelSpec(variant=ModelVariant.ARCH), small_dataset)
        with pytest.raises(LengthMismatchError):
            layout.params_from_unconstrained(np.zeros(layout.dimension + 1))

    def test_arch_rejects_cross_site_phi(self, small_dataset: Dataset) -> None:
        layout = ModelLayout(ModelSpec(variant=ModelVariant.ARCH), small_dataset)
        params = ParameterSet(
            A=np.zeros(2),
            beta=np.zeros((3, 2)),
            Phi=np.array([[0.5, 0.1], [0.0, 0.5]]),
            theta1=np.ones(2),
            theta2=np.full(2, 0.2),
            y_missing=np.zeros(0),
        )
        with pytest.raises(ConstraintViolationError):
            layout.unconstrain(params)

    def test_theta2_outside_unit_interval(self, small_dataset: Dataset) -> None:
        layout = ModelLayout(ModelSpec(variant=ModelVariant.VARCH), small_dataset)
        params = ParameterSet(
            A=np.zeros(2),
            beta=np.zeros((3, 2)),
            Phi=np.zeros((2, 2)),
            theta1=np.ones(2),
            theta2=np.array([0.2, 1.0]),
            y_missing=np.zeros(0),
        )
        with pytest.raises(ConstraintViolationError):
            layout.unconstrain(params)


class TestLogPosterior:
    """Tests for TurbidityPosterior against the per-step oracle."""

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_matches_oracle(self, small_dataset: Dataset, variant: ModelVariant) -> None:
        spec = ModelSpec(variant=variant)
        for seed in range(3):
            params = random_params(variant, 2, 3, 0, seed=seed)
            u = pack_by_hand(params, variant, spec.priors)
            expected = reference_log_posterior(params, spec, small_dataset)
            assert log_posterior(u, spec, small_dataset) == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_matches_oracle_with_missing(
        self, small_dataset: Dataset, variant: ModelVariant
    ) -> None:
        mask = np.zeros_like(small_dataset.mask)
        mask[1, 0] = mask[3, 1] = True
        data = small_dataset.with_mask(mask)
        spec = ModelSpec(variant=variant)
        params = random_params(variant, 2, 3, 2, seed=21)
        u = pack_by_hand(params, variant, spec.priors)
        expected = reference_log_posterior(params, spec, data)
        assert log_posterior(u, spec, data) == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_hand_packing_matches_layout(self, variant: ModelVariant) -> None:
        data = make_dataset(n_times=6, n_sites=3, seed=2, missing_fraction=0.2)
        spec = ModelSpec(variant=variant)
        params = random_params(variant, 3, 3, data.n_missing, seed=4)
        np.testing.assert_allclose(
            ModelLayout(spec, data).unconstrain(params),
            pack_by_hand(params, variant, spec.priors),
            atol=1e-12,
        )

    def test_custom_priors(self, small_dataset: Dataset) -> None:
        priors = PriorConfig(
            theta1_mean=0.5, theta1_sd=2.0, theta2_a=2.0, theta2_b=3.0, sd_A=50.0
        )
        spec = ModelSpec(variant=ModelVariant.VARICH, priors=priors)
        params = random_params(ModelVariant.VARICH, 2, 3, 0, seed=8)
        u = pack_by_hand(params, ModelVariant.VARICH, priors)
        expected = reference_log_posterior(params, spec, small_dataset)
        assert log_posterior(u, spec, small_dataset) == pytest.approx(expected, abs=1e-9)

    def test_dimension_and_names(self, small_dataset: Dataset) -> None:
        posterior = TurbidityPosterior(ModelSpec(variant=ModelVariant.VARCH), small_dataset)
        assert posterior.dimension == 16
        assert posterior.parameter_names[0] == "A[1]"

    def test_constrain_maps_theta_into_support(self, small_dataset: Dataset) -> None:
        posterior = TurbidityPosterior(ModelSpec(variant=ModelVariant.ARCH), small_dataset)
        values = posterior.constrain(np.full(posterior.dimension, -3.0))
        theta2 = values[posterior.layout.blocks["theta2"].span]
        np.testing.assert_allclose(theta2, special.expit(-3.0))

    def test_degrees_of_freedom_checked_against_sites(self, small_dataset: Dataset) -> None:
        spec = ModelSpec(variant=ModelVariant.VAR_IW, priors=PriorConfig(nu=1.0))
        with pytest.raises(ValueError):
            TurbidityPosterior(spec, small_dataset)

    def test_wrong_length(self, small_dataset: Dataset) -> None:
        posterior = TurbidityPosterior(ModelSpec(variant=ModelVariant.ARCH), small_dataset)
        with pytest.raises(LengthMismatchError):
            posterior.log_density(np.zeros(3))

    def test_overflow_is_minus_infinity(self, small_dataset: Dataset) -> None:
        """A non-finite density comes back as -inf with a zero gradient."""
        posterior = TurbidityPosterior(ModelSpec(variant=ModelVariant.ARCH), small_dataset)
        u = np.zeros(posterior.dimension)
        u[posterior.layout.blocks["theta1"].span] = 1000.0
        lp, grad = posterior.log_density_and_gradient(u)
        assert lp == -np.inf
        np.testing.assert_array_equal(grad, 0.0)


def _permute_sites(data: Dataset, perm: list[int]) -> Dataset:
    return Dataset(
        Y=data.Y[:, perm],
        mask=data.mask[:, perm],
        X=data.X[:, :, perm],
        covariate_names=data.covariate_names,
        sites=tuple(data.sites[i] for i in perm),
        site_groups=tuple(data.site_groups[i] for i in perm),
        dates=np.array(data.dates),
    )


def _permute_params(params: ParameterSet, perm: list[int]) -> ParameterSet:
    square = np.ix_(perm, perm)
    return ParameterSet(
        A=params.A[perm],
        beta=params.beta[:, perm],
        Phi=params.Phi[square],
        theta1=None if params.theta1 is None else params.theta1[perm],
        theta2=None if params.theta2 is None else params.theta2[perm],
        Sigma=None if params.Sigma is None else params.Sigma[square],
        y_missing=params.y_missing,
    )


class TestPosteriorStructure:
    """Relations between variants, site orderings and special parameter values."""

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_site_order_does_not_matter(self, variant: ModelVariant) -> None:
        """Relabelling sites leaves the density unchanged.

        The Cholesky parameterization of Sigma is order dependent, so for
        VAR_IW its Jacobian is removed from both sides.
        """
        data = make_dataset(n_times=8, n_sites=3, seed=6)
        perm = [2, 0, 1]
        spec = ModelSpec(variant=variant)
        params = random_params(variant, 3, 3, 0, seed=13)
        moved = _permute_params(params, perm)
        lp = log_posterior(pack_by_hand(params, variant, spec.priors), spec, data)
        lp_moved = log_posterior(
            pack_by_hand(moved, variant, spec.priors), spec, _permute_sites(data, perm)
        )
        if not variant.has_arch_variance:
            lp -= sigma_log_jacobian(params.Sigma)
            lp_moved -= sigma_log_jacobian(moved.Sigma)
        assert lp_moved == pytest.approx(lp, abs=1e-9)

    def test_arch_is_varch_with_diagonal_phi(self) -> None:
        """The two differ only by the off-diagonal priors evaluated at zero."""
        data = make_dataset(n_times=10, n_sites=3, seed=8, missing_fraction=0.1)
        params = random_params(ModelVariant.ARCH, 3, 3, data.n_missing, seed=2)
        arch = ModelSpec(variant=ModelVariant.ARCH)
        varch = ModelSpec(variant=ModelVariant.VARCH)
        lp_arch = log_posterior(pack_by_hand(params, ModelVariant.ARCH, arch.priors), arch, data)
        lp_varch = log_posterior(
            pack_by_hand(params, ModelVariant.VARCH, varch.priors), varch, data
        )
        offdiag = stats.norm.logpdf(0.0, 0.0, varch.priors.sd_phi_offdiag)
        assert lp_varch - lp_arch == pytest.approx(6 * offdiag, abs=1e-9)

    def test_no_dynamics_gives_independent_normals(self) -> None:
        """Phi = 0 and theta2 near 0: each reading is N(A + X beta, theta1)."""
        data = make_dataset(n_times=12, n_sites=2, seed=3, missing_fraction=0.15)
        spec = ModelSpec(variant=ModelVariant.VARCH)
        params = ParameterSet(
            A=np.array([9.0, 11.0]),
            beta=np.array([[0.5, -1.0], [2.0, 0.3], [0.1, 0.2]]),
            Phi=np.zeros((2, 2)),
            theta1=np.array([1.5, 4.0]),
            theta2=np.full(2, 1e-12),
            y_missing=np.full(data.n_missing, 10.0),
        )
        layout = ModelLayout(spec, data)
        loglik = pointwise_loglik(draws_from_params(layout, [params]), spec, data)

        mean = params.A + np.einsum("jts,js->ts", data.X, params.beta)
        cells = stats.norm.logpdf(data.Y, mean, np.sqrt(params.theta1))
        observed = ~data.mask
        observed[0] = False
        np.testing.assert_allclose(loglik[0], cells[observed], rtol=1e-8)

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_finite_on_random_interior_points(
        self, gradient_dataset: Dataset, variant: ModelVariant
    ) -> None:
        posterior = TurbidityPosterior(ModelSpec(variant=variant), gradient_dataset)
        for seed in range(5):
            u = random_unconstrained(posterior.layout, seed=seed, scale=2.0)
            lp, grad = posterior.log_density_and_gradient(u)
            assert np.isfinite(lp)
            assert np.all(np.isfinite(grad))
