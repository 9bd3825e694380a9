"""
Dataset container.

A Dataset is an immutable T x S response matrix with a missing mask,
P covariate matrices of the same shape, per-site group labels and the
daily date index.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from turbidvar.core.exceptions import InvalidDatasetError
from turbidvar.core.models import SiteGroup

logger = logging.getLogger(__name__)

# Shortest series the models can be fitted to
MIN_FIT_LENGTH = 3


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Observed turbidity with covariates.

    Attributes:
        Y: T x S responses in NTU; NaN where ``mask`` is True
        mask: T x S booleans, True marks a missing observation
        X: P x T x S covariates (fully observed)
        covariate_names: P column names, e.g. ("dumping", "dredging", "wind_knots")
        sites: S site identifiers
        site_groups: S site group labels
        dates: T daily dates (numpy datetime64[D])
    """

    Y: np.ndarray
    mask: np.ndarray
    X: np.ndarray
    covariate_names: tuple[str, ...]
    sites: tuple[str, ...]
    site_groups: tuple[SiteGroup, ...]
    dates: np.ndarray
    _missing_index: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        y = np.asarray(self.Y, dtype=float)
        mask = np.asarray(self.mask, dtype=bool)
        x = np.asarray(self.X, dtype=float)
        dates = np.asarray(self.dates, dtype="datetime64[D]")

        if y.ndim != 2:
            raise InvalidDatasetError(
                "Responses must form a T x S matrix.", f"Y has shape {y.shape}"
            )
        n_times, n_sites = y.shape
        if x.ndim == 2 and x.size == 0:
            x = x.reshape(0, n_times, n_sites)
        if mask.shape != y.shape:
            raise InvalidDatasetError(
                "Missing mask does not match responses.",
                f"mask {mask.shape} vs Y {y.shape}",
            )
        if x.shape != (len(self.covariate_names), n_times, n_sites):
            raise InvalidDatasetError(
                "Covariates do not match responses.",
                f"X {x.shape} vs ({len(self.covariate_names)}, {n_times}, {n_sites})",
            )
        if n_times < 1 or n_sites < 1:
            raise InvalidDatasetError("Dataset is empty.", f"shape {y.shape}")
        if len(self.sites) != n_sites or len(self.site_groups) != n_sites:
            raise InvalidDatasetError(
                "Every site needs a name and a group.",
                f"{len(self.sites)} names, {len(self.site_groups)} groups, S={n_sites}",
            )
        if dates.shape != (n_times,):
            raise InvalidDatasetError(
                "One date per time step is required.", f"{dates.shape[0]} dates"
            )
        if n_times > 1 and np.any(np.diff(dates).astype(int) != 1):
            raise InvalidDatasetError(
                "Dates must be consecutive days.", "non-unit date spacing"
            )
        if not np.all(np.isfinite(x)):
            raise InvalidDatasetError(
                "Covariates must be fully observed.", "non-finite covariate value"
            )
        if not np.all(np.isfinite(y[~mask])):
            raise InvalidDatasetError(
                "Observed responses must be finite.", "non-finite unmasked Y"
            )

        y = np.where(mask, np.nan, y)
        object.__setattr__(self, "Y", _readonly(y))
        object.__setattr__(self, "mask", _readonly(mask))
        object.__setattr__(self, "X", _readonly(x))
        object.__setattr__(self, "dates", _readonly(dates))
        object.__setattr__(self, "covariate_names", tuple(self.covariate_names))
        object.__setattr__(self, "sites", tuple(self.sites))
        object.__setattr__(
            self, "site_groups", tuple(SiteGroup(g) for g in self.site_groups)
        )
        object.__setattr__(self, "_missing_index", _readonly(np.argwhere(mask)))

    @property
    def n_times(self) -> int:
        return self.Y.shape[0]

    @property
    def n_sites(self) -> int:
        return self.Y.shape[1]

    @property
    def n_covariates(self) -> int:
        return self.X.shape[0]

    @property
    def n_missing(self) -> int:
        return int(self.mask.sum())

    @property
    def missing_index(self) -> np.ndarray:
        """(t, s) positions of missing entries in row-major order."""
        return self._missing_index

    def check_fittable(self) -> None:
        """
        Check the invariants required for model fitting.

        Raises:
            InvalidDatasetError: If the series is shorter than three days
        """
        if self.n_times < MIN_FIT_LENGTH:
            raise InvalidDatasetError(
                f"At least {MIN_FIT_LENGTH} days are required.",
                f"T={self.n_times}",
            )

    def with_mask(self, mask: np.ndarray) -> "Dataset":
        """Copy with additional entries masked (values under the mask dropped)."""
        combined = np.asarray(mask, dtype=bool) | self.mask
        return Dataset(
            Y=np.where(combined, np.nan, self.Y),
            mask=combined,
            X=self.X,
            covariate_names=self.covariate_names,
            sites=self.sites,
            site_groups=self.site_groups,
            dates=self.dates,
        )

    def equals(self, other: "Dataset") -> bool:
        """Value equality (NaN-aware)."""
        return (
            self.sites == other.sites
            and self.site_groups == other.site_groups
            and self.covariate_names == other.covariate_names
            and np.array_equal(self.dates, other.dates)
            and np.array_equal(self.mask, other.mask)
            and np.array_equal(self.Y, other.Y, equal_nan=True)
            and np.array_equal(self.X, other.X)
        )
