"""
Warmup adaptation: dual-averaging step size and a diagonal metric.

Schedule over ``n_warmup`` iterations:

    [0, n/2)        step size only, unit metric
    [n/2, 3n/4)     step size, draws collected for the metric
    3n/4            metric set from the collected variances, step size
                    re-initialized and dual averaging restarted
    [3n/4, n)       step size only

After warmup the step size is frozen at the dual-averaging average.
"""

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class DualAveraging:
    """
    Nesterov dual averaging of log step size toward a target acceptance.

    Usage:
        adapter = DualAveraging(step_size=0.1, target_accept=0.8)
        step_size = adapter.update(accept_stat)
        final = adapter.final_step_size
    """

    step_size: float
    target_accept: float
    gamma: float = 0.05
    t0: float = 10.0
    kappa: float = 0.75
    _mu: float = field(init=False)
    _h_bar: float = field(init=False, default=0.0)
    _log_avg: float = field(init=False, default=0.0)
    _count: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        self._mu = math.log(10.0 * self.step_size)

    def update(self, accept_stat: float) -> float:
        self._count += 1
        eta = 1.0 / (self._count + self.t0)
        self._h_bar = (1.0 - eta) * self._h_bar + eta * (self.target_accept - accept_stat)
        log_step = self._mu - math.sqrt(self._count) / self.gamma * self._h_bar
        weight = self._count ** (-self.kappa)
        self._log_avg = weight * log_step + (1.0 - weight) * self._log_avg
        self.step_size = math.exp(log_step)
        return self.step_size

    @property
    def final_step_size(self) -> float:
        if self._count == 0:
            return self.step_size
        return math.exp(self._log_avg)


class WelfordVariance:
    """Streaming per-coordinate mean and variance."""

    def __init__(self, dimension: int):
        self.count = 0
        self._mean = np.zeros(dimension)
        self._m2 = np.zeros(dimension)

    def add(self, x: np.ndarray) -> None:
        self.count += 1
        delta = x - self._mean
        self._mean += delta / self.count
        self._m2 += delta * (x - self._mean)

    def regularized_variance(self) -> np.ndarray:
        """Sample variance shrunk toward 1e-3 with weight 5 / (n + 5)."""
        n = self.count
        variance = self._m2 / (n - 1)
        return (n / (n + 5.0)) * variance + 1e-3 * (5.0 / (n + 5.0))


@dataclass(frozen=True)
class WarmupSchedule:
    n_warmup: int

    @property
    def metric_start(self) -> int:
        return self.n_warmup // 2

    @property
    def metric_end(self) -> int:
        return (3 * self.n_warmup) // 4

    def collects_metric(self, iteration: int) -> bool:
        return self.metric_start <= iteration < self.metric_end

    def updates_metric(self, iteration: int) -> bool:
        """True on the iteration right after the collection window closes."""
        return iteration == self.metric_end - 1
