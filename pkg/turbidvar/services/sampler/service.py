"""
Multi-chain sampling service.

Runs independent NUTS chains in a thread pool and merges them by chain
index. Each chain gets its own counter-based generator spawned from the
root seed, so the output does not depend on thread scheduling.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from turbidvar.core.exceptions import AllInitializationsFailedError, LengthMismatchError
from turbidvar.core.models import SamplerConfig, SamplerTelemetry
from turbidvar.core.protocols import ConstrainedModel, LogDensity
from turbidvar.services.sampler.adaptation import (
    DualAveraging,
    WarmupSchedule,
    WelfordVariance,
)
from turbidvar.services.sampler.nuts import find_reasonable_step_size, nuts_transition

logger = logging.getLogger(__name__)

INIT_RADIUS = 2.0
INIT_ATTEMPTS = 100

# Leading columns of the draws CSV
CHAIN_COLUMN = "chain"
ITERATION_COLUMN = "iteration"


@dataclass(frozen=True, eq=False)
class PosteriorDraws:
    """
    Post-warmup draws of all chains.

    Attributes:
        constrained: chains x draws x K constrained values, columns ``names``
        names: K parameter names
        unconstrained: chains x draws x D sampler coordinates (None when
            loaded from a draws file)
        telemetry: Sampler statistics (None when loaded from a draws file)
    """

    constrained: np.ndarray
    names: tuple[str, ...]
    unconstrained: np.ndarray | None = None
    telemetry: SamplerTelemetry | None = None

    def __post_init__(self) -> None:
        if self.constrained.ndim != 3 or self.constrained.shape[2] != len(self.names):
            raise LengthMismatchError(
                "Draws do not match their parameter names.",
                f"array {self.constrained.shape} vs {len(self.names)} names",
            )

    @property
    def n_chains(self) -> int:
        return self.constrained.shape[0]

    @property
    def n_draws(self) -> int:
        return self.constrained.shape[1]

    def column(self, name: str) -> np.ndarray:
        """chains x draws array of one parameter."""
        try:
            index = self.names.index(name)
        except ValueError:
            raise KeyError(f"Unknown parameter: {name}") from None
        return self.constrained[:, :, index]

    def pooled(self) -> np.ndarray:
        """(chains * draws) x K, chain-major."""
        return self.constrained.reshape(-1, len(self.names))

    def to_frame(self) -> pd.DataFrame:
        """One row per kept iteration with chain and iteration columns."""
        n_chains, n_draws, _ = self.constrained.shape
        frame = pd.DataFrame(self.pooled(), columns=list(self.names))
        frame.insert(0, ITERATION_COLUMN, np.tile(np.arange(1, n_draws + 1), n_chains))
        frame.insert(0, CHAIN_COLUMN, np.repeat(np.arange(1, n_chains + 1), n_draws))
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "PosteriorDraws":
        """
        Inverse of ``to_frame``.

        Raises:
            LengthMismatchError: If chains have different lengths
        """
        names = tuple(c for c in frame.columns if c not in (CHAIN_COLUMN, ITERATION_COLUMN))
        frame = frame.sort_values([CHAIN_COLUMN, ITERATION_COLUMN], kind="stable")
        counts = frame.groupby(CHAIN_COLUMN).size()
        if counts.nunique() != 1:
            raise LengthMismatchError(
                "Every chain must have the same number of draws.",
                f"draws per chain: {counts.to_dict()}",
            )
        values = frame[list(names)].to_numpy(dtype=float)
        return cls(
            constrained=values.reshape(len(counts), int(counts.iloc[0]), len(names)),
            names=names,
        )


@dataclass(frozen=True)
class _ChainResult:
    unconstrained: np.ndarray
    step_size: float
    divergences: int
    mean_accept: float
    mean_leapfrog: float


def _initial_point(
    target: LogDensity, rng: np.random.Generator, chain: int
) -> tuple[np.ndarray, float, np.ndarray]:
    for attempt in range(INIT_ATTEMPTS):
        position = rng.uniform(-INIT_RADIUS, INIT_RADIUS, size=target.dimension)
        log_density, gradient = target.log_density_and_gradient(position)
        if np.isfinite(log_density) and np.all(np.isfinite(gradient)):
            if attempt:
                logger.info(f"Chain {chain}: initialized after {attempt + 1} attempts")
            return position, float(log_density), np.asarray(gradient)
    raise AllInitializationsFailedError(
        "Could not find a starting point with finite density.",
        f"chain {chain}: {INIT_ATTEMPTS} draws from U(-{INIT_RADIUS}, {INIT_RADIUS}) failed",
    )


def _run_chain(
    target: LogDensity,
    config: SamplerConfig,
    seed: np.random.SeedSequence,
    chain: int,
) -> _ChainResult:
    rng = np.random.Generator(np.random.Philox(seed))
    max_depth = max(1, int(math.floor(math.log2(config.max_leapfrog_steps))))
    position, log_density, gradient = _initial_point(target, rng, chain)

    inv_metric = np.ones(target.dimension)
    step_size = find_reasonable_step_size(
        position, log_density, gradient, inv_metric, target, rng
    )
    adapter = DualAveraging(step_size, config.target_accept)
    schedule = WarmupSchedule(config.n_warmup)
    welford = WelfordVariance(target.dimension)

    kept = np.empty((config.n_kept, target.dimension))
    divergences = 0
    accept_total = 0.0
    leapfrog_total = 0

    for iteration in range(config.n_iter):
        transition = nuts_transition(
            position, log_density, gradient, step_size, inv_metric, target, rng, max_depth
        )
        position = transition.position
        log_density = transition.log_density
        gradient = transition.gradient

        if iteration < config.n_warmup:
            step_size = adapter.update(transition.accept_stat)
            if schedule.collects_metric(iteration):
                welford.add(position)
            if schedule.updates_metric(iteration) and welford.count >= 2:
                inv_metric = welford.regularized_variance()
                step_size = find_reasonable_step_size(
                    position, log_density, gradient, inv_metric, target, rng, step_size
                )
                adapter = DualAveraging(step_size, config.target_accept)
            if iteration == config.n_warmup - 1:
                step_size = adapter.final_step_size
                logger.info(f"Chain {chain}: warmup done, step size {step_size:.4g}")
            continue

        kept[iteration - config.n_warmup] = position
        divergences += int(transition.divergent)
        accept_total += transition.accept_stat
        leapfrog_total += transition.n_leapfrog

    return _ChainResult(
        unconstrained=kept,
        step_size=step_size,
        divergences=divergences,
        mean_accept=accept_total / config.n_kept,
        mean_leapfrog=leapfrog_total / config.n_kept,
    )


class SamplerService:
    """
    Runs multi-chain NUTS against any LogDensity.

    Usage:
        service = SamplerService(max_workers=4)
        draws = service.run(posterior, SamplerConfig(seed=1))
    """

    def __init__(self, max_workers: int | None = None):
        """
        Args:
            max_workers: Thread pool size; one thread per chain when None
        """
        self._max_workers = max_workers

    @property
    def max_workers(self) -> int | None:
        return self._max_workers

    def run(self, target: LogDensity, config: SamplerConfig) -> PosteriorDraws:
        """
        Sample ``config.n_chains`` chains.

        Returns:
            PosteriorDraws with named constrained draws when the target
            implements ConstrainedModel, the unconstrained draws otherwise

        Raises:
            AllInitializationsFailedError: If a chain cannot start
        """
        seeds = np.random.SeedSequence(config.seed).spawn(config.n_chains)
        workers = self._max_workers or config.n_chains
        logger.info(
            f"Sampling {config.n_chains} chains x {config.n_iter} iterations "
            f"({config.n_warmup} warmup), dimension {target.dimension}"
        )
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_chain, target, config, seed, chain)
                for chain, seed in enumerate(seeds)
            ]
            results = [future.result() for future in futures]

        unconstrained = np.stack([r.unconstrained for r in results])
        if isinstance(target, ConstrainedModel):
            names = tuple(target.parameter_names)
            constrained = np.apply_along_axis(target.constrain, 2, unconstrained)
        else:
            names = tuple(f"u[{i + 1}]" for i in range(target.dimension))
            constrained = unconstrained.copy()

        telemetry = SamplerTelemetry(
            step_sizes=[r.step_size for r in results],
            divergences=[r.divergences for r in results],
            mean_accept=[r.mean_accept for r in results],
            mean_leapfrog_steps=[r.mean_leapfrog for r in results],
        )
        logger.info(
            f"Sampling done: {telemetry.total_divergences} divergences, "
            f"mean accept {np.mean(telemetry.mean_accept):.3f}"
        )
        return PosteriorDraws(
            constrained=constrained,
            names=names,
            unconstrained=unconstrained,
            telemetry=telemetry,
        )


def run_chains(
    target: LogDensity, config: SamplerConfig, max_workers: int | None = None
) -> PosteriorDraws:
    """Sample ``target``; see ``SamplerService.run``."""
    return SamplerService(max_workers).run(target, config)
