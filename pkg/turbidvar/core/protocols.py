"""
Protocol definitions (interfaces) between services.

Using typing.Protocol instead of ABC so that any object with the right
methods (a model posterior, a test Gaussian) can be handed to the sampler
without inheriting from anything.
"""

from typing import Protocol, runtime_checkable

import numpy as np


@runtime_checkable
class LogDensity(Protocol):
    """
    Protocol for sampler targets.

    Implementations evaluate an unnormalized log density on an
    unconstrained real vector together with its gradient. They must be
    pure: the sampler calls them concurrently from several chains.
    """

    @property
    def dimension(self) -> int:
        """Length of the unconstrained parameter vector."""
        ...

    def log_density_and_gradient(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        """
        Evaluate the log density and its gradient.

        Args:
            u: Unconstrained point of length ``dimension``

        Returns:
            (log density, gradient). A rejected point returns -inf.
        """
        ...


@runtime_checkable
class ConstrainedModel(LogDensity, Protocol):
    """
    A sampler target that knows its constrained parameterization.

    When a target implements this, the sampler stores named constrained
    draws next to the unconstrained ones.
    """

    @property
    def parameter_names(self) -> list[str]:
        """Names of the constrained values returned by ``constrain``."""
        ...

    def constrain(self, u: np.ndarray) -> np.ndarray:
        """Constrained values for an unconstrained point."""
        ...
