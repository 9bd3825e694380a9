"""Deterministic numerical kernels: factorization, densities, transforms."""

from turbidvar.kernels.densities import (
    beta_logpdf,
    inv_wishart_logpdf,
    mvn_logpdf,
    trunc_normal_logpdf,
)
from turbidvar.kernels.linalg import cholesky
from turbidvar.kernels.transforms import Support, to_constrained, to_unconstrained

__all__ = [
    "cholesky",
    "mvn_logpdf",
    "inv_wishart_logpdf",
    "trunc_normal_logpdf",
    "beta_logpdf",
    "Support",
    "to_unconstrained",
    "to_constrained",
]
