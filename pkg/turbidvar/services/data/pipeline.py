"""
Raw sensor ingestion.

Workflow:
1. load_raw → validated 15-minute turbidity readings
2. aggregate_daily → per (date, site) means on a complete date grid
3. build_dataset → join with wind and the operations log into a Dataset

Calendar days are taken in UTC. Wind gaps inside the modelled date range
are fatal; turbidity gaps become missing values.
"""

import logging
from collections.abc import Mapping
from pathlib import Path

import numpy as np
import pandas as pd

from turbidvar.core.exceptions import (
    EmptyFileError,
    FileNotFoundConfigError,
    MissingCovariateError,
    NoDateOverlapError,
    ParseError,
    ParseReason,
    UnclassifiedSiteError,
)
from turbidvar.core.models import SiteGroup
from turbidvar.services.model.dataset import Dataset

logger = logging.getLogger(__name__)

TURBIDITY_COLUMNS = ("timestamp", "site", "turbidity_ntu")
WIND_COLUMNS = ("date", "wind_knots")
OPERATIONS_COLUMNS = ("date", "operation")
OPERATIONS = ("dredging", "dumping")
COVARIATE_NAMES = ("dumping", "dredging", "wind_knots")

# First data row is line 2 of the file
FIRST_DATA_LINE = 2


def read_table(path: Path, columns: tuple[str, ...]) -> pd.DataFrame:
    """
    Read a CSV as strings and check its header.

    Raises:
        FileNotFoundConfigError: If the file does not exist
        EmptyFileError: If the file has no data rows
        ParseError: If a required column is missing (line 1)
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundConfigError(str(path))
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise EmptyFileError("Input file is empty.", f"{path} has no header") from None
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise ParseError(1, ParseReason.MISSING_FIELD, f"{path.name}: no column {missing[0]}")
    if frame.empty:
        raise EmptyFileError("Input file has no rows.", f"{path} has only a header")
    return frame


def _line(index: int) -> int:
    return index + FIRST_DATA_LINE


def _parse_numbers(frame: pd.DataFrame, column: str, non_negative: bool) -> pd.Series:
    for index, text in frame[column].items():
        if text == "":
            raise ParseError(_line(index), ParseReason.MISSING_FIELD, column)
    values = pd.to_numeric(frame[column], errors="coerce")
    bad = values.isna() | ~np.isfinite(values)
    if bad.any():
        index = bad.idxmax()
        raise ParseError(
            _line(index), ParseReason.NON_NUMERIC, f"{column}={frame[column][index]!r}"
        )
    if non_negative and (values < 0).any():
        index = (values < 0).idxmax()
        raise ParseError(_line(index), ParseReason.NEGATIVE_VALUE, f"{column}={values[index]}")
    return values.astype(float)


def _parse_dates(frame: pd.DataFrame, column: str) -> pd.Series:
    for index, text in frame[column].items():
        if text == "":
            raise ParseError(_line(index), ParseReason.MISSING_FIELD, column)
    stamps = pd.to_datetime(frame[column], errors="coerce", utc=True, format="ISO8601")
    if stamps.isna().any():
        index = stamps.isna().idxmax()
        raise ParseError(
            _line(index), ParseReason.BAD_TIMESTAMP, f"{column}={frame[column][index]!r}"
        )
    return stamps


def load_raw(path: Path) -> pd.DataFrame:
    """
    Load raw turbidity readings.

    Returns:
        DataFrame (timestamp UTC, site, turbidity_ntu) sorted by (site, timestamp)

    Raises:
        ParseError: Non-numeric, negative, duplicate or undated rows
        EmptyFileError: No rows
    """
    frame = read_table(path, TURBIDITY_COLUMNS)
    for index, site in frame["site"].items():
        if site == "":
            raise ParseError(_line(index), ParseReason.MISSING_FIELD, "site")
    records = pd.DataFrame(
        {
            "timestamp": _parse_dates(frame, "timestamp"),
            "site": frame["site"],
            "turbidity_ntu": _parse_numbers(frame, "turbidity_ntu", non_negative=True),
        }
    )
    duplicated = records.duplicated(["site", "timestamp"])
    if duplicated.any():
        index = duplicated.idxmax()
        raise ParseError(
            _line(index),
            ParseReason.DUPLICATE,
            f"site {records['site'][index]} at {records['timestamp'][index]}",
        )
    records = records.sort_values(["site", "timestamp"], kind="stable").reset_index(drop=True)
    logger.info(f"Loaded {len(records)} readings for {records['site'].nunique()} sites")
    return records


def load_wind(path: Path) -> pd.Series:
    """Daily wind speed in knots indexed by date."""
    frame = read_table(path, WIND_COLUMNS)
    dates = _parse_dates(frame, "date").dt.tz_convert(None).dt.normalize()
    values = _parse_numbers(frame, "wind_knots", non_negative=True)
    duplicated = dates.duplicated()
    if duplicated.any():
        index = duplicated.idxmax()
        raise ParseError(_line(index), ParseReason.DUPLICATE, f"date {dates[index].date()}")
    return pd.Series(values.to_numpy(), index=pd.DatetimeIndex(dates), name="wind_knots")


def load_operations(path: Path) -> pd.DataFrame:
    """Operations log as (date, operation) with operation in OPERATIONS."""
    frame = read_table(path, OPERATIONS_COLUMNS)
    dates = _parse_dates(frame, "date").dt.tz_convert(None).dt.normalize()
    operations = frame["operation"].str.strip().str.lower()
    unknown = ~operations.isin(OPERATIONS)
    if unknown.any():
        index = unknown.idxmax()
        raise ParseError(
            _line(index), ParseReason.UNKNOWN_OPERATION, repr(frame["operation"][index])
        )
    return pd.DataFrame({"date": dates, "operation": operations}).drop_duplicates()


def aggregate_daily(records: pd.DataFrame, min_readings: int = 1) -> pd.DataFrame:
    """
    Daily mean turbidity per site.

    Args:
        records: Output of ``load_raw``
        min_readings: Days with fewer readings at a site are missing

    Returns:
        DataFrame indexed by every date from the first to the last reading,
        one column per site (sorted), NaN where the day is missing
    """
    days = records["timestamp"].dt.tz_convert("UTC").dt.tz_localize(None).dt.normalize()
    grouped = records.assign(date=days).groupby(["date", "site"])["turbidity_ntu"]
    daily = grouped.mean().where(grouped.size() >= min_readings).unstack("site")
    grid = pd.date_range(days.min(), days.max(), freq="D", name="date")
    daily = daily.reindex(grid).sort_index(axis=1)
    daily.columns.name = None
    logger.debug(
        f"Aggregated to {len(grid)} days x {daily.shape[1]} sites, "
        f"{int(daily.isna().sum().sum())} missing"
    )
    return daily


def build_dataset(
    daily: pd.DataFrame,
    wind: pd.Series,
    operations: pd.DataFrame,
    site_groups: Mapping[str, SiteGroup | str],
) -> Dataset:
    """
    Join daily turbidity with covariates.

    The modelled range is the overlap of the turbidity grid with the wind
    record. Operation indicators are 1 at sites of the matching group on
    logged dates: dumping at dump sites, dredging at dredging sites.

    Raises:
        UnclassifiedSiteError: A site without a group
        NoDateOverlapError: Turbidity and wind share no dates
        MissingCovariateError: Wind missing on a modelled date
    """
    sites = list(daily.columns)
    unclassified = [s for s in sites if s not in site_groups]
    if unclassified:
        raise UnclassifiedSiteError(
            "Every site needs a DredgingSite or DumpSite label.",
            f"unclassified sites: {', '.join(map(str, unclassified))}",
        )
    groups = tuple(SiteGroup(site_groups[s]) for s in sites)

    wind = wind.sort_index()
    start = max(daily.index.min(), wind.index.min())
    end = min(daily.index.max(), wind.index.max())
    if start > end:
        raise NoDateOverlapError(
            "Turbidity and wind records do not overlap.",
            f"turbidity {daily.index.min().date()}..{daily.index.max().date()}, "
            f"wind {wind.index.min().date()}..{wind.index.max().date()}",
        )
    grid = pd.date_range(start, end, freq="D")
    wind_values = wind.reindex(grid)
    if wind_values.isna().any():
        gap = wind_values.index[wind_values.isna()][0]
        raise MissingCovariateError(
            "Wind speed is missing on a modelled date.", f"no wind on {gap.date()}"
        )
    y = daily.reindex(grid).to_numpy(dtype=float)

    n_times, n_sites = y.shape
    x = np.zeros((len(COVARIATE_NAMES), n_times, n_sites))
    for j, (operation, group) in enumerate(
        (("dumping", SiteGroup.DUMP_SITE), ("dredging", SiteGroup.DREDGING_SITE))
    ):
        logged = operations.loc[operations["operation"] == operation, "date"]
        on_day = grid.isin(pd.DatetimeIndex(logged))
        at_site = np.array([g is group for g in groups])
        x[j] = np.outer(on_day, at_site)
    x[2] = wind_values.to_numpy()[:, None]

    dataset = Dataset(
        Y=y,
        mask=np.isnan(y),
        X=x,
        covariate_names=COVARIATE_NAMES,
        sites=tuple(str(s) for s in sites),
        site_groups=groups,
        dates=grid.to_numpy().astype("datetime64[D]"),
    )
    logger.info(
        f"Built dataset: T={dataset.n_times}, S={dataset.n_sites}, "
        f"missing={dataset.n_missing}, {start.date()}..{end.date()}"
    )
    return dataset


def ingest(
    turbidity_path: Path,
    wind_path: Path,
    operations_path: Path,
    site_groups: Mapping[str, SiteGroup | str],
    min_readings: int = 1,
) -> Dataset:
    """load_raw → aggregate_daily → build_dataset over the three raw files."""
    daily = aggregate_daily(load_raw(turbidity_path), min_readings=min_readings)
    return build_dataset(
        daily, load_wind(wind_path), load_operations(operations_path), site_groups
    )
