"""
Parameter sets and the packed parameter layout.

The unconstrained vector handed to the sampler is packed in a fixed order:

    A           S            unbounded
    beta        P * S        unbounded, covariate-major (beta[j, s])
    Phi         S * S        unbounded, row-major (S diagonal entries for ARCH)
    theta1      S            log scale            (ARCH, VARCH, VARICH)
    theta2      S            logit scale          (ARCH, VARCH, VARICH)
    Sigma       S(S+1)/2     Cholesky factor, row-major lower triangle,
                             log diagonal         (VAR_IW)
    y_missing   n_missing    scaled logit onto the missing-value interval,
                             row-major mask order

The constrained view uses the same order and names, with the Sigma block
holding the lower triangle of Sigma itself.
"""

import math
from dataclasses import dataclass

import numpy as np

from turbidvar.core.exceptions import ConstraintViolationError, LengthMismatchError
from turbidvar.core.models import ModelSpec, ModelVariant
from turbidvar.kernels.transforms import (
    Support,
    constrain_with_derivatives,
    to_unconstrained,
)
from turbidvar.services.model.dataset import Dataset

POSITIVE = Support.positive()
UNIT_INTERVAL = Support.interval(0.0, 1.0)


@dataclass(frozen=True, eq=False)
class ParameterSet:
    """
    Model parameters in constrained space.

    Phi is always a full S x S matrix; for ARCH its off-diagonals are zero.
    theta1/theta2 are None for VAR_IW, Sigma is None otherwise.
    """

    A: np.ndarray
    beta: np.ndarray
    Phi: np.ndarray
    theta1: np.ndarray | None = None
    theta2: np.ndarray | None = None
    Sigma: np.ndarray | None = None
    y_missing: np.ndarray | None = None

    def missing_values(self) -> np.ndarray:
        if self.y_missing is None:
            return np.zeros(0)
        return np.asarray(self.y_missing, dtype=float)

    def validate(self, variant: ModelVariant, n_sites: int, n_covariates: int) -> None:
        """
        Check shapes and constraint membership.

        Raises:
            ConstraintViolationError: On the first violated constraint
        """
        problems: list[str] = []
        if np.shape(self.A) != (n_sites,):
            problems.append(f"A shape {np.shape(self.A)}")
        if np.shape(self.beta) != (n_covariates, n_sites):
            problems.append(f"beta shape {np.shape(self.beta)}")
        if np.shape(self.Phi) != (n_sites, n_sites):
            problems.append(f"Phi shape {np.shape(self.Phi)}")
        elif not variant.has_full_phi:
            off = self.Phi - np.diag(np.diag(self.Phi))
            if np.any(off != 0):
                problems.append("ARCH Phi must be diagonal")
        if variant.has_arch_variance:
            if self.theta1 is None or np.any(np.asarray(self.theta1) <= 0):
                problems.append("theta1 must be positive")
            if self.theta2 is None or np.any(
                (np.asarray(self.theta2) <= 0) | (np.asarray(self.theta2) >= 1)
            ):
                problems.append("theta2 must lie in (0, 1)")
        else:
            if self.Sigma is None:
                problems.append("VAR_IW requires Sigma")
            else:
                sigma = np.asarray(self.Sigma)
                if sigma.shape != (n_sites, n_sites) or not np.allclose(sigma, sigma.T):
                    problems.append("Sigma must be a symmetric S x S matrix")
                elif np.any(np.linalg.eigvalsh(sigma) <= 0):
                    problems.append("Sigma must be positive definite")
        if problems:
            raise ConstraintViolationError(
                "Parameters violate their constraints.", "; ".join(problems)
            )


@dataclass(frozen=True)
class Block:
    """Contiguous slice of the packed vector."""

    name: str
    start: int
    size: int

    @property
    def span(self) -> slice:
        return slice(self.start, self.start + self.size)


class ModelLayout:
    """
    Packing, unpacking and naming of parameters for a (spec, dataset) pair.

    Usage:
        layout = ModelLayout(spec, data)
        u = layout.unconstrain(params)
        params = layout.params_from_unconstrained(u)
    """

    def __init__(self, spec: ModelSpec, data: Dataset):
        self.spec = spec
        self.variant = spec.variant
        self.n_sites = data.n_sites
        self.n_covariates = data.n_covariates
        self.n_missing = data.n_missing
        self.missing_index = data.missing_index
        self.missing_support = Support.interval(
            spec.priors.missing_lower, spec.priors.missing_upper
        )

        s, p = self.n_sites, self.n_covariates
        sizes = [("A", s), ("beta", p * s)]
        sizes.append(("Phi", s * s if self.variant.has_full_phi else s))
        if self.variant.has_arch_variance:
            sizes += [("theta1", s), ("theta2", s)]
        else:
            sizes.append(("Sigma", s * (s + 1) // 2))
        sizes.append(("y_missing", self.n_missing))

        self.blocks: dict[str, Block] = {}
        start = 0
        for name, size in sizes:
            self.blocks[name] = Block(name, start, size)
            start += size
        self.dimension = start
        self._tril = np.tril_indices(s)
        self._diag_positions = np.array(
            [i * (i + 1) // 2 + i for i in range(s)], dtype=int
        )

    # -------------------------------------------------------------------------
    # Names
    # -------------------------------------------------------------------------

    @property
    def names(self) -> list[str]:
        """Names of the constrained parameters, 1-based indices."""
        s = self.n_sites
        names = [f"A[{i + 1}]" for i in range(s)]
        names += [
            f"beta[{j + 1},{i + 1}]" for j in range(self.n_covariates) for i in range(s)
        ]
        if self.variant.has_full_phi:
            names += [f"Phi[{i + 1},{k + 1}]" for i in range(s) for k in range(s)]
        else:
            names += [f"Phi[{i + 1},{i + 1}]" for i in range(s)]
        if self.variant.has_arch_variance:
            names += [f"theta1[{i + 1}]" for i in range(s)]
            names += [f"theta2[{i + 1}]" for i in range(s)]
        else:
            names += [f"Sigma[{i + 1},{k + 1}]" for i, k in zip(*self._tril, strict=True)]
        names += [f"y_missing[{i + 1}]" for i in range(self.n_missing)]
        return names

    def phi_names(self) -> list[str]:
        block = self.blocks["Phi"]
        return self.names[block.span]

    # -------------------------------------------------------------------------
    # Unconstrained <-> constrained
    # -------------------------------------------------------------------------

    def check_length(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dimension,):
            raise LengthMismatchError(
                "Parameter vector has the wrong length.",
                f"expected {self.dimension}, got {u.shape}",
            )
        return u

    def block(self, u: np.ndarray, name: str) -> np.ndarray:
        return u[self.blocks[name].span]

    def phi_matrix(self, values: np.ndarray) -> np.ndarray:
        """Phi as S x S from its packed block."""
        if self.variant.has_full_phi:
            return values.reshape(self.n_sites, self.n_sites)
        return np.diag(values)

    def cholesky_from_block(self, values: np.ndarray) -> np.ndarray:
        """Lower Cholesky factor from its packed (log-diagonal) block."""
        factor = np.zeros((self.n_sites, self.n_sites))
        factor[self._tril] = values
        diag = np.arange(self.n_sites)
        factor[diag, diag] = np.exp(factor[diag, diag])
        return factor

    def sigma_log_jacobian(self, values: np.ndarray) -> tuple[float, np.ndarray]:
        """
        log |d Sigma / d u| for the packed Cholesky block and its gradient.

        Sigma = L L^T with L_ii = exp(u_ii) contributes
        S log 2 + sum_i (S - i + 1) u_ii for 0-based i.
        """
        s = self.n_sites
        weights = np.zeros_like(values)
        weights[self._diag_positions] = s - np.arange(s) + 1
        return s * math.log(2.0) + float(weights @ values), weights

    def params_from_unconstrained(self, u: np.ndarray) -> ParameterSet:
        u = self.check_length(u)
        s, p = self.n_sites, self.n_covariates
        theta1 = theta2 = sigma = None
        if self.variant.has_arch_variance:
            theta1 = constrain_with_derivatives(self.block(u, "theta1"), POSITIVE)[0]
            theta2 = constrain_with_derivatives(self.block(u, "theta2"), UNIT_INTERVAL)[0]
        else:
            factor = self.cholesky_from_block(self.block(u, "Sigma"))
            sigma = factor @ factor.T
        y_missing = constrain_with_derivatives(
            self.block(u, "y_missing"), self.missing_support
        )[0]
        return ParameterSet(
            A=self.block(u, "A").copy(),
            beta=self.block(u, "beta").reshape(p, s).copy(),
            Phi=self.phi_matrix(self.block(u, "Phi")).copy(),
            theta1=theta1,
            theta2=theta2,
            Sigma=sigma,
            y_missing=y_missing,
        )

    def unconstrain(self, params: ParameterSet) -> np.ndarray:
        """
        Packed unconstrained vector for a parameter set.

        Raises:
            ConstraintViolationError: If params violate their constraints
            LengthMismatchError: If y_missing has the wrong length
        """
        params.validate(self.variant, self.n_sites, self.n_covariates)
        y_missing = params.missing_values()
        if y_missing.shape != (self.n_missing,):
            raise LengthMismatchError(
                "Imputed values do not match the missing mask.",
                f"expected {self.n_missing}, got {y_missing.shape[0]}",
            )
        parts = [np.asarray(params.A, float), np.asarray(params.beta, float).ravel()]
        phi = np.asarray(params.Phi, dtype=float)
        parts.append(phi.ravel() if self.variant.has_full_phi else np.diag(phi).copy())
        if self.variant.has_arch_variance:
            parts.append(np.atleast_1d(to_unconstrained(params.theta1, POSITIVE)[0]))
            parts.append(np.atleast_1d(to_unconstrained(params.theta2, UNIT_INTERVAL)[0]))
        else:
            factor = np.linalg.cholesky(np.asarray(params.Sigma, dtype=float))
            packed = factor[self._tril].copy()
            packed[self._diag_positions] = np.log(packed[self._diag_positions])
            parts.append(packed)
        if self.n_missing:
            try:
                u_missing = to_unconstrained(y_missing, self.missing_support)[0]
            except Exception as e:
                raise ConstraintViolationError(
                    "Imputed values outside the missing-value interval.", str(e)
                ) from e
            parts.append(np.atleast_1d(u_missing))
        return np.concatenate(parts)

    def constrained_vector(self, params: ParameterSet) -> np.ndarray:
        """Flat constrained values in ``names`` order."""
        parts = [np.asarray(params.A, float), np.asarray(params.beta, float).ravel()]
        phi = np.asarray(params.Phi, dtype=float)
        parts.append(phi.ravel() if self.variant.has_full_phi else np.diag(phi).copy())
        if self.variant.has_arch_variance:
            parts += [np.asarray(params.theta1, float), np.asarray(params.theta2, float)]
        else:
            parts.append(np.asarray(params.Sigma, dtype=float)[self._tril])
        parts.append(params.missing_values())
        return np.concatenate(parts)

    def constrain(self, u: np.ndarray) -> np.ndarray:
        """Flat constrained values for an unconstrained vector."""
        return self.constrained_vector(self.params_from_unconstrained(u))

    def params_from_constrained(self, values: np.ndarray) -> ParameterSet:
        """Inverse of ``constrained_vector``."""
        v = self.check_length(values)
        s, p = self.n_sites, self.n_covariates
        theta1 = theta2 = sigma = None
        if self.variant.has_arch_variance:
            theta1 = self.block(v, "theta1").copy()
            theta2 = self.block(v, "theta2").copy()
        else:
            sigma = np.zeros((s, s))
            sigma[self._tril] = self.block(v, "Sigma")
            sigma = sigma + np.tril(sigma, -1).T
        return ParameterSet(
            A=self.block(v, "A").copy(),
            beta=self.block(v, "beta").reshape(p, s).copy(),
            Phi=self.phi_matrix(self.block(v, "Phi")).copy(),
            theta1=theta1,
            theta2=theta2,
            Sigma=sigma,
            y_missing=self.block(v, "y_missing").copy(),
        )
