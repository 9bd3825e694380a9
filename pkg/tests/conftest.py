"""
Pytest configuration and fixtures.

Provides reusable test fixtures for:
- Gaussian sampler targets
- Small random datasets and parameter points for every model variant
- Draws built from fixed parameter sets
- Demo data and raw sensor files
"""

import numpy as np
import pytest

from turbidvar.core.models import ModelSpec, ModelVariant, SamplerConfig, SiteGroup
from turbidvar.services.model.dataset import Dataset
from turbidvar.services.model.layout import ModelLayout, ParameterSet
from turbidvar.services.sampler.service import PosteriorDraws
from turbidvar.services.simulate import demo_dataset

ALL_VARIANTS = list(ModelVariant)


# =============================================================================
# Sampler targets
# =============================================================================


class GaussianTarget:
    """Zero-mean multivariate normal with covariance ``cov``."""

    def __init__(self, cov: np.ndarray):
        self.cov = np.asarray(cov, dtype=float)
        self.precision = np.linalg.inv(self.cov)

    @property
    def dimension(self) -> int:
        return self.cov.shape[0]

    def log_density_and_gradient(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        grad = -self.precision @ u
        return float(0.5 * u @ grad), grad


@pytest.fixture
def standard_normal_1d() -> GaussianTarget:
    return GaussianTarget(np.eye(1))


@pytest.fixture
def standard_normal_5d() -> GaussianTarget:
    return GaussianTarget(np.eye(5))


@pytest.fixture
def correlated_normal() -> GaussianTarget:
    """2-D Gaussian with correlation 0.9."""
    return GaussianTarget(np.array([[1.0, 0.9], [0.9, 1.0]]))


@pytest.fixture
def quick_sampler() -> SamplerConfig:
    """Short sampler run for plumbing tests."""
    return SamplerConfig(n_chains=2, n_iter=60, n_warmup=30, seed=7)


# =============================================================================
# Datasets
# =============================================================================


def make_dataset(
    n_times: int,
    n_sites: int,
    seed: int,
    missing_fraction: float = 0.0,
    level: float = 10.0,
) -> Dataset:
    """Random dataset with the three standard covariates."""
    rng = np.random.default_rng(seed)
    groups = tuple(
        SiteGroup.DREDGING_SITE if s % 2 == 0 else SiteGroup.DUMP_SITE for s in range(n_sites)
    )
    is_dump = np.array([g is SiteGroup.DUMP_SITE for g in groups])
    active = rng.random(n_times) < 0.3
    x = np.stack(
        [
            np.outer(active, is_dump).astype(float),
            np.outer(active, ~is_dump).astype(float),
            np.repeat(rng.uniform(2.0, 20.0, (n_times, 1)), n_sites, axis=1),
        ]
    )
    y = level + rng.normal(0.0, 2.0, (n_times, n_sites))
    mask = rng.random((n_times, n_sites)) < missing_fraction
    return Dataset(
        Y=np.where(mask, np.nan, y),
        mask=mask,
        X=x,
        covariate_names=("dumping", "dredging", "wind_knots"),
        sites=tuple(f"site-{s + 1}" for s in range(n_sites)),
        site_groups=groups,
        dates=np.datetime64("2020-01-01") + np.arange(n_times),
    )


def random_unconstrained(layout: ModelLayout, seed: int, scale: float = 0.5) -> np.ndarray:
    """Random interior point of the unconstrained space."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(-scale, scale, layout.dimension)
    u[layout.blocks["A"].span] += 10.0
    return u


def draws_from_params(
    layout: ModelLayout, params: list[ParameterSet], n_chains: int = 1
) -> PosteriorDraws:
    """PosteriorDraws holding the given parameter sets, split evenly over chains."""
    values = np.array([layout.constrained_vector(p) for p in params])
    return PosteriorDraws(
        constrained=values.reshape(n_chains, -1, values.shape[1]),
        names=tuple(layout.names),
    )


@pytest.fixture
def small_dataset() -> Dataset:
    """S=2, T=5, fully observed."""
    return make_dataset(n_times=5, n_sites=2, seed=11)


@pytest.fixture
def gradient_dataset() -> Dataset:
    """S=3, T=30, about 10% missing."""
    return make_dataset(n_times=30, n_sites=3, seed=5, missing_fraction=0.1)


@pytest.fixture
def demo_short() -> Dataset:
    """Seven-site demo data, 40 days."""
    data, _ = demo_dataset(ModelVariant.VARCH, seed=3, n_days=40)
    return data


@pytest.fixture
def arch_spec() -> ModelSpec:
    return ModelSpec(variant=ModelVariant.ARCH)
