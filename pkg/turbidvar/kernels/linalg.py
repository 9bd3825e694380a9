"""
Matrix factorization helpers.

Covariance matrices are carried as lower Cholesky factors; densities are
evaluated through the factor.
"""

import numpy as np
from scipy import linalg

from turbidvar.core.exceptions import NotPositiveDefiniteError

# Relative tolerance for accepting a matrix as symmetric
SYMMETRY_RTOL = 1e-12


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """
    Return (S + S^T) / 2 after checking S is symmetric within tolerance.

    Raises:
        NotPositiveDefiniteError: If S is not square or visibly asymmetric
    """
    s = np.asarray(matrix, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise NotPositiveDefiniteError(
            "Covariance must be a square matrix.",
            f"expected square matrix, got shape {s.shape}",
        )
    scale = max(float(np.max(np.abs(s))), 1.0)
    asymmetry = float(np.max(np.abs(s - s.T)))
    if asymmetry > SYMMETRY_RTOL * scale:
        raise NotPositiveDefiniteError(
            "Covariance must be symmetric.",
            f"max |S - S^T| = {asymmetry:.3e} exceeds tolerance",
        )
    return 0.5 * (s + s.T)


def cholesky(matrix: np.ndarray) -> np.ndarray:
    """
    Lower Cholesky factor L with L @ L.T == S.

    Args:
        matrix: Symmetric positive definite matrix

    Returns:
        Lower-triangular factor with positive diagonal

    Raises:
        NotPositiveDefiniteError: If any pivot is <= 0
    """
    s = symmetrize(matrix)
    try:
        factor = linalg.cholesky(s, lower=True)
    except linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(
            "Covariance matrix is not positive definite.",
            f"Cholesky failed: {e}",
        ) from None
    if np.any(np.diag(factor) <= 0) or not np.all(np.isfinite(factor)):
        raise NotPositiveDefiniteError(
            "Covariance matrix is not positive definite.",
            "non-positive Cholesky pivot",
        )
    return factor


def chol_logdet(factor: np.ndarray) -> float:
    """log |S| from its Cholesky factor."""
    return 2.0 * float(np.sum(np.log(np.diag(factor))))


def chol_inverse(factor: np.ndarray) -> np.ndarray:
    """S^{-1} from its Cholesky factor."""
    return linalg.cho_solve((factor, True), np.eye(factor.shape[0]))


def whiten(factor: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Solve L z = x, so that |z|^2 = x^T S^{-1} x (x may hold columns)."""
    return linalg.solve_triangular(factor, x, lower=True)
