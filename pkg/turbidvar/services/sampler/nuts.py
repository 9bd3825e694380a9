"""
No-U-turn Hamiltonian transition with multinomial trajectory sampling.

The trajectory is doubled in a random direction until the generalized
U-turn criterion fires, a divergence is met or the step cap is reached.
Subtrees are combined the same way at every level; the root merge uses
biased progressive sampling, inner merges uniform progressive sampling.

All randomness comes from the generator passed in, so a transition is a
pure function of (state, step size, metric, rng state).
"""

import math
from dataclasses import dataclass

import numpy as np

from turbidvar.core.protocols import LogDensity

# Energy error beyond which a trajectory is declared divergent
DIVERGENCE_THRESHOLD = 1000.0


def kinetic_energy(momentum: np.ndarray, inv_metric: np.ndarray) -> float:
    return 0.5 * float(np.dot(momentum, inv_metric * momentum))


@dataclass(frozen=True)
class Point:
    """A phase-space point with its cached log density and gradient."""

    position: np.ndarray
    momentum: np.ndarray
    log_density: float
    gradient: np.ndarray

    def hamiltonian(self, inv_metric: np.ndarray) -> float:
        """Negative total energy: log density minus kinetic energy."""
        return self.log_density - kinetic_energy(self.momentum, inv_metric)


@dataclass(frozen=True)
class LeapfrogResult:
    position: np.ndarray
    momentum: np.ndarray
    log_density: float
    gradient: np.ndarray
    energy_error: float
    divergent: bool
    n_steps: int


def _step(point: Point, step_size: float, target: LogDensity, inv_metric: np.ndarray) -> Point:
    momentum = point.momentum + 0.5 * step_size * point.gradient
    position = point.position + step_size * inv_metric * momentum
    log_density, gradient = target.log_density_and_gradient(position)
    momentum = momentum + 0.5 * step_size * gradient
    return Point(position, momentum, float(log_density), np.asarray(gradient))


def leapfrog(
    position: np.ndarray,
    momentum: np.ndarray,
    step_size: float,
    n_steps: int,
    target: LogDensity,
    inv_metric: np.ndarray | None = None,
) -> LeapfrogResult:
    """
    Integrate Hamiltonian dynamics for ``n_steps`` leapfrog steps.

    Integration stops early once the energy error exceeds
    ``DIVERGENCE_THRESHOLD``; the result is then flagged divergent.

    Args:
        position: Start position
        momentum: Start momentum
        step_size: Step size (negative integrates backwards)
        n_steps: Number of steps
        target: Log density with gradient
        inv_metric: Diagonal inverse metric, identity when None

    Returns:
        LeapfrogResult with the end point and the energy error
        (start minus end Hamiltonian, positive when energy grows)
    """
    position = np.asarray(position, dtype=float)
    momentum = np.asarray(momentum, dtype=float)
    if inv_metric is None:
        inv_metric = np.ones_like(position)
    log_density, gradient = target.log_density_and_gradient(position)
    point = Point(position.copy(), momentum.copy(), float(log_density), np.asarray(gradient))
    start = point.hamiltonian(inv_metric)

    error = 0.0
    taken = 0
    for _ in range(n_steps):
        point = _step(point, step_size, target, inv_metric)
        taken += 1
        current = point.hamiltonian(inv_metric)
        error = start - current if np.isfinite(current) else math.inf
        if error > DIVERGENCE_THRESHOLD:
            break
    return LeapfrogResult(
        position=point.position,
        momentum=point.momentum,
        log_density=point.log_density,
        gradient=point.gradient,
        energy_error=error,
        divergent=error > DIVERGENCE_THRESHOLD,
        n_steps=taken,
    )


@dataclass
class _Tree:
    """
    A contiguous piece of trajectory.

    Attributes:
        minus, plus: End points in the backward and forward direction
        proposal: Point selected from this piece
        log_weight: log of the summed multinomial weights
        momentum_sum: Sum of momenta over the piece
        keep_going: False once a U-turn or divergence was detected
        accept_sum, n_points: Running acceptance statistic
    """

    minus: Point
    plus: Point
    proposal: Point
    log_weight: float
    momentum_sum: np.ndarray
    keep_going: bool
    accept_sum: float
    n_points: int
    divergent: bool

    @classmethod
    def leaf(cls, point: Point, log_weight: float, accept: float, divergent: bool) -> "_Tree":
        return cls(
            minus=point,
            plus=point,
            proposal=point,
            log_weight=log_weight,
            momentum_sum=point.momentum.copy(),
            keep_going=not divergent,
            accept_sum=accept,
            n_points=1,
            divergent=divergent,
        )

    def merge(
        self,
        other: "_Tree",
        direction: int,
        root: bool,
        inv_metric: np.ndarray,
        rng: np.random.Generator,
    ) -> None:
        """Absorb ``other``, which extends this tree in ``direction``."""
        if direction < 0:
            left, right = other, self
        else:
            left, right = self, other
        inner_left, inner_right = left.plus, right.minus
        left_sum, right_sum = left.momentum_sum, right.momentum_sum
        self.minus, self.plus = left.minus, right.plus

        self.accept_sum += other.accept_sum
        self.n_points += other.n_points
        self.divergent |= other.divergent
        self.keep_going = self.keep_going and other.keep_going
        if not self.keep_going:
            return

        if root:
            probability = math.exp(min(0.0, other.log_weight - self.log_weight))
            self.log_weight = float(np.logaddexp(self.log_weight, other.log_weight))
        else:
            self.log_weight = float(np.logaddexp(self.log_weight, other.log_weight))
            probability = math.exp(other.log_weight - self.log_weight)
        if probability > 0.0 and rng.uniform() < probability:
            self.proposal = other.proposal

        self.momentum_sum = left_sum + right_sum
        sharp_minus = inv_metric * self.minus.momentum
        sharp_plus = inv_metric * self.plus.momentum
        sharp_inner_left = inv_metric * inner_left.momentum
        sharp_inner_right = inv_metric * inner_right.momentum
        total = self.momentum_sum
        checks = (
            total @ sharp_minus > 0,
            total @ sharp_plus > 0,
            (left_sum + inner_right.momentum) @ sharp_minus > 0,
            (left_sum + inner_right.momentum) @ sharp_inner_right > 0,
            (right_sum + inner_left.momentum) @ sharp_inner_left > 0,
            (right_sum + inner_left.momentum) @ sharp_plus > 0,
        )
        self.keep_going = all(checks)


def _build_tree(
    tree: _Tree,
    direction: int,
    depth: int,
    step_size: float,
    target: LogDensity,
    inv_metric: np.ndarray,
    start_hamiltonian: float,
    rng: np.random.Generator,
) -> _Tree:
    if depth == 0:
        edge = tree.minus if direction < 0 else tree.plus
        point = _step(edge, direction * step_size, target, inv_metric)
        hamiltonian = point.hamiltonian(inv_metric)
        delta = hamiltonian - start_hamiltonian if np.isfinite(hamiltonian) else -math.inf
        divergent = -delta > DIVERGENCE_THRESHOLD
        accept = min(1.0, math.exp(delta)) if delta < 0 else 1.0
        return _Tree.leaf(point, delta, accept, divergent)

    subtree = _build_tree(
        tree, direction, depth - 1, step_size, target, inv_metric, start_hamiltonian, rng
    )
    if subtree.keep_going:
        extension = _build_tree(
            subtree,
            direction,
            depth - 1,
            step_size,
            target,
            inv_metric,
            start_hamiltonian,
            rng,
        )
        subtree.merge(extension, direction, root=False, inv_metric=inv_metric, rng=rng)
    return subtree


@dataclass(frozen=True)
class Transition:
    """Outcome of one sampler iteration."""

    position: np.ndarray
    log_density: float
    gradient: np.ndarray
    accept_stat: float
    n_leapfrog: int
    tree_depth: int
    divergent: bool


def nuts_transition(
    position: np.ndarray,
    log_density: float,
    gradient: np.ndarray,
    step_size: float,
    inv_metric: np.ndarray,
    target: LogDensity,
    rng: np.random.Generator,
    max_depth: int,
) -> Transition:
    """
    One NUTS iteration from ``position``.

    Args:
        position, log_density, gradient: Current state and its cached values
        step_size: Leapfrog step size
        inv_metric: Diagonal inverse metric
        target: Log density with gradient
        rng: Chain-local generator
        max_depth: Maximum number of doublings (2**max_depth leapfrog steps)
    """
    momentum = rng.normal(size=position.shape) / np.sqrt(inv_metric)
    start = Point(position, momentum, log_density, gradient)
    start_hamiltonian = start.hamiltonian(inv_metric)
    tree = _Tree(
        minus=start,
        plus=start,
        proposal=start,
        log_weight=0.0,
        momentum_sum=momentum.copy(),
        keep_going=True,
        accept_sum=0.0,
        n_points=0,
        divergent=False,
    )

    depth = 0
    while depth < max_depth and tree.keep_going:
        direction = 1 if rng.integers(0, 2) else -1
        extension = _build_tree(
            tree, direction, depth, step_size, target, inv_metric, start_hamiltonian, rng
        )
        tree.merge(extension, direction, root=True, inv_metric=inv_metric, rng=rng)
        depth += 1

    proposal = tree.proposal
    return Transition(
        position=proposal.position,
        log_density=proposal.log_density,
        gradient=proposal.gradient,
        accept_stat=tree.accept_sum / max(tree.n_points, 1),
        n_leapfrog=tree.n_points,
        tree_depth=depth,
        divergent=tree.divergent,
    )


def find_reasonable_step_size(
    position: np.ndarray,
    log_density: float,
    gradient: np.ndarray,
    inv_metric: np.ndarray,
    target: LogDensity,
    rng: np.random.Generator,
    initial: float = 1.0,
) -> float:
    """
    Double or halve the step size until a single leapfrog step's acceptance
    probability crosses one half.
    """
    step_size = initial
    momentum = rng.normal(size=position.shape) / np.sqrt(inv_metric)
    start = Point(position, momentum, log_density, gradient)
    h0 = start.hamiltonian(inv_metric)

    def log_ratio(eps: float) -> float:
        h = _step(start, eps, target, inv_metric).hamiltonian(inv_metric)
        return h - h0 if np.isfinite(h) else -math.inf

    ratio = log_ratio(step_size)
    direction = 1 if ratio > math.log(0.5) else -1
    for _ in range(100):
        if not direction * ratio > -direction * math.log(2.0):
            break
        candidate = step_size * 2.0**direction
        if not 1e-10 < candidate < 1e7:
            break
        step_size = candidate
        ratio = log_ratio(step_size)
    return step_size
