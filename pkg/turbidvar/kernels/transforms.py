"""
Constrained <-> unconstrained transforms.

The sampler moves on R^n; constrained parameters are recovered through
these maps. Every map reports log |d value / d u| (the log Jacobian of the
inverse map) so that densities transform correctly.

Supports:
    positive        value = exp(u)
    interval(a, b)  value = a + (b - a) * logistic(u)
    unbounded       value = u
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from turbidvar.core.exceptions import InvalidArgumentError, OutOfSupportError


class SupportKind(str, Enum):
    """Kind of constraint on a scalar parameter."""

    POSITIVE = "positive"
    INTERVAL = "interval"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Support:
    """Constraint on a scalar parameter."""

    kind: SupportKind
    lo: float = -math.inf
    hi: float = math.inf

    @classmethod
    def positive(cls) -> "Support":
        return cls(SupportKind.POSITIVE, 0.0, math.inf)

    @classmethod
    def interval(cls, lo: float, hi: float) -> "Support":
        if not lo < hi:
            raise InvalidArgumentError(
                "Interval support needs lo < hi.", f"got ({lo}, {hi})"
            )
        return cls(SupportKind.INTERVAL, lo, hi)

    @classmethod
    def unbounded(cls) -> "Support":
        return cls(SupportKind.UNBOUNDED)

    def contains(self, value) -> bool:
        v = np.asarray(value, dtype=float)
        if self.kind is SupportKind.UNBOUNDED:
            return bool(np.all(np.isfinite(v)))
        return bool(np.all((v > self.lo) & (v < self.hi)))


def to_unconstrained(value, support: Support):
    """
    Map a constrained value to the real line.

    Args:
        value: Scalar or array inside the support
        support: Constraint of the value

    Returns:
        (u, log_jacobian) where log_jacobian = log |d value / d u| at u

    Raises:
        OutOfSupportError: If value is outside the (open) support
    """
    if not support.contains(value):
        raise OutOfSupportError(
            "Value outside the parameter support.",
            f"value {value} not in {support.kind.value}({support.lo}, {support.hi})",
        )
    v = np.asarray(value, dtype=float)
    if support.kind is SupportKind.POSITIVE:
        u = np.log(v)
    elif support.kind is SupportKind.INTERVAL:
        u = special.logit((v - support.lo) / (support.hi - support.lo))
    else:
        u = v.copy()
    _, log_jac = to_constrained(u, support)
    return _scalar(u), log_jac


def to_constrained(u, support: Support):
    """
    Map a real value into the support.

    Returns:
        (value, log_jacobian) with log_jacobian = log |d value / d u|
    """
    u = np.asarray(u, dtype=float)
    if support.kind is SupportKind.POSITIVE:
        value = np.exp(u)
        log_jac = u
    elif support.kind is SupportKind.INTERVAL:
        width = support.hi - support.lo
        value = support.lo + width * special.expit(u)
        log_jac = math.log(width) + special.log_expit(u) + special.log_expit(-u)
    else:
        value = u.copy()
        log_jac = np.zeros_like(u)
    return _scalar(value), _scalar(log_jac)


def constrain_with_derivatives(u: np.ndarray, support: Support):
    """
    Vectorized inverse map with the pieces needed for gradients.

    Returns:
        value: constrained values
        dvalue_du: d value / d u
        log_jac: log |d value / d u|
        dlogjac_du: d log_jac / d u
    """
    u = np.asarray(u, dtype=float)
    if support.kind is SupportKind.POSITIVE:
        value = np.exp(u)
        return value, value, u.copy(), np.ones_like(u)
    if support.kind is SupportKind.INTERVAL:
        width = support.hi - support.lo
        p = special.expit(u)
        value = support.lo + width * p
        log_jac = math.log(width) + special.log_expit(u) + special.log_expit(-u)
        return value, width * p * (1.0 - p), log_jac, 1.0 - 2.0 * p
    return u.copy(), np.ones_like(u), np.zeros_like(u), np.zeros_like(u)


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x
