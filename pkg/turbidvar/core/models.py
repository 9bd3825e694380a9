"""
Pydantic models for turbidvar.

Configuration and report structures used throughout the application are
defined here. Models provide:
- Type safety
- Automatic validation
- JSON serialization/deserialization

Numeric containers (Dataset, ParameterSet, PosteriorDraws) hold numpy
arrays and live next to the code that produces them as frozen dataclasses.
"""

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ModelVariant(str, Enum):
    """
    Structure of the latent effect and error covariance.

    ARCH:   diagonal Phi, ARCH(1) diagonal variance
    VAR_IW: full Phi, constant covariance with inverse-Wishart prior
    VARCH:  full Phi, ARCH(1) diagonal variance
    VARICH: full Phi acting on differenced latent effects, ARCH(1) variance
    """

    ARCH = "ARCH"
    VAR_IW = "VAR_IW"
    VARCH = "VARCH"
    VARICH = "VARICH"

    @property
    def has_arch_variance(self) -> bool:
        """Whether the variance follows theta1 + theta2 * Y_{t-1}^2."""
        return self is not ModelVariant.VAR_IW

    @property
    def has_full_phi(self) -> bool:
        """Whether Phi carries off-diagonal (cross-site) terms."""
        return self is not ModelVariant.ARCH

    @property
    def first_likelihood_index(self) -> int:
        """0-based index of the first time with a likelihood term."""
        return 2 if self is ModelVariant.VARICH else 1


class SiteGroup(str, Enum):
    """Operational role of a monitoring site."""

    DREDGING_SITE = "DredgingSite"
    DUMP_SITE = "DumpSite"


class CovariateRole(str, Enum):
    """Meaning of a covariate column, which selects its effect prior."""

    DUMPING = "dumping"
    DREDGING = "dredging"
    WIND = "wind"


DEFAULT_COVARIATE_ROLES = (
    CovariateRole.DUMPING,
    CovariateRole.DREDGING,
    CovariateRole.WIND,
)


class PriorConfig(BaseModel):
    """
    Prior hyperparameters.

    Effect priors are split by site group: an operation covariate gets
    ``sd_effect_active`` at sites where the operation happens and
    ``sd_effect_inactive`` elsewhere.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    sd_A: float = Field(default=100.0, gt=0)
    """Prior sd of the intercepts A_s (NTU)"""

    sd_beta_wind: float = Field(default=1.0, gt=0)
    """Prior sd of the wind effects (NTU per knot)"""

    sd_effect_active: float = Field(default=25.0, gt=0)
    """Prior sd of an operation effect at sites where it happens"""

    sd_effect_inactive: float = Field(default=0.3, gt=0)
    """Prior sd of an operation effect at sites where it does not happen"""

    sd_phi_diag: float = Field(default=0.5, gt=0)
    sd_phi_offdiag: float = Field(default=0.1, gt=0)

    theta1_mean: float = 0.0
    theta1_sd: float = Field(default=1.0, gt=0)
    """theta1 ~ N(theta1_mean, theta1_sd^2) truncated below at 0"""

    theta2_a: float = Field(default=1.0, gt=0)
    theta2_b: float = Field(default=5.0, gt=0)
    """theta2 ~ Beta(theta2_a, theta2_b)"""

    nu: float = 14.0
    Psi: list[list[float]] | None = None
    """Inverse-Wishart scale; None means the identity of size S"""

    missing_mean: float = 0.0
    missing_sd: float = Field(default=50.0, gt=0)
    missing_lower: float = 0.0
    missing_upper: float = 100.0
    """Imputed values ~ N(missing_mean, missing_sd^2) truncated to [lower, upper]"""

    @model_validator(mode="after")
    def _check_missing_bounds(self) -> "PriorConfig":
        if not self.missing_lower < self.missing_upper:
            raise ValueError("missing_lower must be below missing_upper")
        return self

    def psi_matrix(self, n_sites: int) -> np.ndarray:
        """Inverse-Wishart scale as an S x S array."""
        if self.Psi is None:
            return np.eye(n_sites)
        psi = np.asarray(self.Psi, dtype=float)
        if psi.shape != (n_sites, n_sites):
            raise ValueError(f"Psi must be {n_sites}x{n_sites}, got {psi.shape}")
        return psi

    def check_sites(self, n_sites: int) -> None:
        """Validate the size-dependent constraints (nu > S - 1, Psi SPD)."""
        if self.nu <= n_sites - 1:
            raise ValueError(f"nu must exceed S - 1 = {n_sites - 1}, got {self.nu}")
        psi = self.psi_matrix(n_sites)
        if not np.allclose(psi, psi.T) or np.any(np.linalg.eigvalsh(psi) <= 0):
            raise ValueError("Psi must be symmetric positive definite")


class ModelSpec(BaseModel):
    """Model variant, priors and the role of each covariate."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    variant: ModelVariant
    priors: PriorConfig = Field(default_factory=PriorConfig)
    covariate_roles: tuple[CovariateRole, ...] = DEFAULT_COVARIATE_ROLES


class MissingBlock(BaseModel):
    """A run of consecutive missing days at one site (0-based indices)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    site: int = Field(ge=0)
    start: int = Field(ge=0)
    length: int = Field(gt=0)


class SamplerConfig(BaseModel):
    """
    Settings for the Hamiltonian sampler.

    ``n_iter`` counts warmup iterations, so ``n_iter - n_warmup`` draws
    are kept per chain.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_chains: int = Field(default=4, gt=0)
    n_iter: int = Field(default=1000, gt=0)
    n_warmup: int = Field(default=200, gt=0)
    target_accept: float = Field(default=0.8, gt=0, lt=1)
    max_leapfrog_steps: int = Field(default=1024, gt=0)
    seed: int = Field(default=20170831, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _check_warmup(self) -> "SamplerConfig":
        if self.n_warmup >= self.n_iter:
            raise ValueError(
                f"n_warmup ({self.n_warmup}) must be smaller than n_iter ({self.n_iter})"
            )
        return self

    @property
    def n_kept(self) -> int:
        """Post-warmup draws per chain."""
        return self.n_iter - self.n_warmup


# =============================================================================
# Report models
# =============================================================================


class WaicResult(BaseModel):
    """Widely applicable information criterion on the deviance scale."""

    waic: float
    se: float
    p_waic: float
    lppd: float


class LooResult(BaseModel):
    """Importance-sampling leave-one-out criterion on the deviance scale."""

    looic: float
    se: float
    pareto_k: list[float]
    """Fitted generalized Pareto shape per likelihood point"""

    flagged_points: list[int] = Field(default_factory=list)
    """Indices of points with k above the reliability threshold"""


class ParameterSummary(BaseModel):
    """Posterior summary of one scalar parameter."""

    name: str
    mean: float
    sd: float
    q2_5: float
    q50: float
    q97_5: float
    rhat: float | None = None
    ess: float | None = None


class ForecastPoint(BaseModel):
    """One-step-ahead predictive distribution at a (time, site) cell."""

    t: int
    date: str
    site: str
    mean: float
    lower: float
    upper: float
    observed: float | None = None

    @model_validator(mode="after")
    def _check_order(self) -> "ForecastPoint":
        if self.upper < self.lower:
            raise ValueError("interval upper bound below lower bound")
        return self


class SamplerTelemetry(BaseModel):
    """Per-chain sampler statistics after warmup."""

    step_sizes: list[float]
    divergences: list[int]
    mean_accept: list[float]
    mean_leapfrog_steps: list[float]

    @property
    def total_divergences(self) -> int:
        return int(sum(self.divergences))


class FitReport(BaseModel):
    """Diagnostics, criteria, summaries and forecasts of one fitted model."""

    variant: ModelVariant
    n_chains: int
    n_draws: int
    rhat: dict[str, float | None]
    ess: dict[str, float]
    zero_variance_parameters: list[str] = Field(default_factory=list)
    waic: WaicResult
    looic: LooResult
    summaries: list[ParameterSummary]
    forecasts: list[ForecastPoint]
    coverage: float | None = Field(default=None, ge=0.0, le=1.0)
    """None when no forecast cell is observed"""
    spectral_radius: float = Field(ge=0.0)
    stationary: bool
    telemetry: SamplerTelemetry

    def rhat_range(self) -> tuple[float, float]:
        """Smallest and largest defined R-hat."""
        values = [v for v in self.rhat.values() if v is not None]
        if not values:
            return float("nan"), float("nan")
        return min(values), max(values)


class ComparisonRow(BaseModel):
    """One line of the model comparison table."""

    model: str
    waic: float
    waic_se: float
    looic: float
    looic_se: float
    spectral_radius: float


class RunManifest(BaseModel):
    """Everything needed to rerun a command exactly."""

    command: str
    version: str
    config_hash: str
    dataset_hash: str | None = None
    seed: int | None = None
    variant: ModelVariant | None = None
    outputs: list[str] = Field(default_factory=list)
