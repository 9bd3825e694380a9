"""
Dataset CSV format.

Long format, one row per (date, site):

    date,site,turbidity_ntu,<covariate columns...>[,site_group]

The standard covariate columns are dumping, dredging and wind_knots. An
empty turbidity field is a missing value. The trailing site_group column
is optional on read; without it the caller must supply the groups.
"""

import io
import logging
from collections.abc import Mapping
from pathlib import Path

import numpy as np
import pandas as pd

from turbidvar.core.exceptions import (
    InvalidDatasetError,
    ParseError,
    ParseReason,
    UnclassifiedSiteError,
)
from turbidvar.core.models import SiteGroup
from turbidvar.services.data.pipeline import (
    COVARIATE_NAMES,
    _line,
    _parse_dates,
    _parse_numbers,
    read_table,
)
from turbidvar.services.model.dataset import Dataset
from turbidvar.utils.hashing import atomic_write_text, sha256_text

logger = logging.getLogger(__name__)

KEY_COLUMNS = ("date", "site", "turbidity_ntu")
GROUP_COLUMN = "site_group"


def dataset_to_csv(data: Dataset) -> str:
    """Canonical CSV text of a dataset, rows ordered by date then site."""
    n_times, n_sites = data.n_times, data.n_sites
    dates = pd.to_datetime(data.dates).strftime("%Y-%m-%d")
    frame = pd.DataFrame(
        {
            "date": np.repeat(dates, n_sites),
            "site": np.tile(np.array(data.sites, dtype=object), n_times),
            "turbidity_ntu": np.asarray(data.Y).ravel(),
        }
    )
    for j, name in enumerate(data.covariate_names):
        frame[name] = np.asarray(data.X[j]).ravel()
    frame[GROUP_COLUMN] = np.tile(np.array([g.value for g in data.site_groups]), n_times)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, na_rep="", lineterminator="\n")
    return buffer.getvalue()


def write_dataset(data: Dataset, path: Path) -> Path:
    """Write ``data`` atomically in the dataset CSV format."""
    path = atomic_write_text(Path(path), dataset_to_csv(data))
    logger.info(f"Dataset written to {path}: T={data.n_times}, S={data.n_sites}")
    return path


def dataset_hash(data: Dataset) -> str:
    return sha256_text(dataset_to_csv(data))


def read_dataset(
    path: Path, site_groups: Mapping[str, SiteGroup | str] | None = None
) -> Dataset:
    """
    Read a dataset CSV.

    Args:
        path: Dataset file
        site_groups: Site groups, required when the file has no site_group
            column; overrides the column otherwise

    Raises:
        ParseError: Malformed rows
        UnclassifiedSiteError: A site without a group
        InvalidDatasetError: Incomplete (date, site) grid or gaps in dates
    """
    frame = read_table(path, KEY_COLUMNS)
    covariates = [c for c in frame.columns if c not in KEY_COLUMNS and c != GROUP_COLUMN]
    dates = _parse_dates(frame, "date").dt.tz_convert(None).dt.normalize()
    for index, site in frame["site"].items():
        if site == "":
            raise ParseError(_line(index), ParseReason.MISSING_FIELD, "site")

    y = pd.to_numeric(frame["turbidity_ntu"].replace("", np.nan), errors="coerce")
    bad = (y.isna() & (frame["turbidity_ntu"] != "")) | np.isinf(y)
    if bad.any():
        index = bad.idxmax()
        raise ParseError(
            _line(index), ParseReason.NON_NUMERIC, repr(frame["turbidity_ntu"][index])
        )
    values = {name: _parse_numbers(frame, name, non_negative=False) for name in covariates}

    long = pd.DataFrame({"date": dates, "site": frame["site"], "y": y, **values})
    duplicated = long.duplicated(["date", "site"])
    if duplicated.any():
        index = duplicated.idxmax()
        raise ParseError(_line(index), ParseReason.DUPLICATE, f"site {long['site'][index]}")

    sites = list(dict.fromkeys(long["site"]))
    grid = pd.date_range(long["date"].min(), long["date"].max(), freq="D")
    index = pd.MultiIndex.from_product([grid, sites], names=["date", "site"])
    long = long.set_index(["date", "site"])
    if len(long) != len(index) or not long.index.isin(index).all():
        raise InvalidDatasetError(
            "Dataset file must hold every (date, site) pair once.",
            f"{len(long)} rows for {len(grid)} days x {len(sites)} sites",
        )
    long = long.reindex(index)

    groups = _site_groups(frame, sites, site_groups)
    y_matrix = long["y"].to_numpy(dtype=float).reshape(len(grid), len(sites))
    x = np.zeros((len(covariates), len(grid), len(sites)))
    for j, name in enumerate(covariates):
        x[j] = long[name].to_numpy(dtype=float).reshape(len(grid), len(sites))
    data = Dataset(
        Y=y_matrix,
        mask=np.isnan(y_matrix),
        X=x,
        covariate_names=tuple(covariates),
        sites=tuple(sites),
        site_groups=groups,
        dates=grid.to_numpy().astype("datetime64[D]"),
    )
    logger.info(
        f"Read dataset {Path(path).name}: T={data.n_times}, S={data.n_sites}, "
        f"missing={data.n_missing}"
    )
    return data


def _site_groups(
    frame: pd.DataFrame,
    sites: list[str],
    override: Mapping[str, SiteGroup | str] | None,
) -> tuple[SiteGroup, ...]:
    if override is not None:
        missing = [s for s in sites if s not in override]
        if missing:
            raise UnclassifiedSiteError(
                "Every site needs a DredgingSite or DumpSite label.",
                f"unclassified sites: {', '.join(missing)}",
            )
        return tuple(SiteGroup(override[s]) for s in sites)
    if GROUP_COLUMN not in frame.columns:
        raise UnclassifiedSiteError(
            "Site groups are needed for a dataset without a site_group column.",
            "no site_group column and no site_groups mapping",
        )
    labels = frame.groupby("site")[GROUP_COLUMN].agg(lambda v: set(v))
    groups = []
    for site in sites:
        found = labels[site] - {""}
        if len(found) != 1:
            raise UnclassifiedSiteError(
                "Every site needs exactly one group label.",
                f"site {site}: {sorted(found) or 'no label'}",
            )
        try:
            groups.append(SiteGroup(found.pop()))
        except ValueError:
            raise UnclassifiedSiteError(
                "Unknown site group label.", f"site {site}: {sorted(labels[site])}"
            ) from None
    return tuple(groups)


__all__ = [
    "COVARIATE_NAMES",
    "dataset_hash",
    "dataset_to_csv",
    "read_dataset",
    "write_dataset",
]
