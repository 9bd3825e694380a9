"""
Bundled demo data.

Seven sites (four dredging sites, three dump sites) observed daily for
488 days from 2017-08-31. The operation schedule, wind process and true
parameters are fixed constants below; nothing here is fitted to real
measurements.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from turbidvar.core.models import ModelSpec, ModelVariant, SiteGroup
from turbidvar.services.model.dataset import Dataset
from turbidvar.services.model.layout import ParameterSet
from turbidvar.services.simulate.generator import (
    DEFAULT_COVARIATE_NAMES,
    DEFAULT_START_DATE,
    simulate,
)
from turbidvar.utils.hashing import atomic_write_text

logger = logging.getLogger(__name__)

DEMO_N_DAYS = 488
DEMO_N_SITES = 7
DEMO_N_DREDGING_SITES = 4

# Dredging campaigns as [start, end) day offsets; spoil is dumped every
# other day of a campaign
DREDGING_CAMPAIGNS = ((20, 48), (150, 185), (330, 372))
DUMPING_EVERY = 2

WIND_MEAN_KNOTS = 10.0
WIND_AR = 0.7
WIND_INNOVATION_SD = 3.0

READINGS_PER_DAY = 96


def demo_sites(n_sites: int = DEMO_N_SITES) -> tuple[tuple[str, ...], tuple[SiteGroup, ...]]:
    """
    Site names and groups, dredging sites first.

    Keeps the 4:3 split of the seven-site layout; any n_sites >= 2 has at
    least one site of each group.
    """
    if n_sites == 1:
        return ("dredge-1",), (SiteGroup.DREDGING_SITE,)
    n_dredge = min(max(1, round(n_sites * DEMO_N_DREDGING_SITES / DEMO_N_SITES)), n_sites - 1)
    names = tuple(f"dredge-{i + 1}" for i in range(n_dredge)) + tuple(
        f"dump-{i + 1}" for i in range(n_sites - n_dredge)
    )
    groups = (SiteGroup.DREDGING_SITE,) * n_dredge + (SiteGroup.DUMP_SITE,) * (
        n_sites - n_dredge
    )
    return names, groups


def demo_schedule(n_days: int = DEMO_N_DAYS) -> tuple[np.ndarray, np.ndarray]:
    """Daily dredging and dumping flags (booleans of length n_days)."""
    dredging = np.zeros(n_days, dtype=bool)
    dumping = np.zeros(n_days, dtype=bool)
    for start, end in DREDGING_CAMPAIGNS:
        days = np.arange(start, min(end, n_days))
        dredging[days] = True
        dumping[days[(days - start) % DUMPING_EVERY == 0]] = True
    return dredging, dumping


def demo_wind(n_days: int, rng: np.random.Generator) -> np.ndarray:
    """AR(1) wind speed around ``WIND_MEAN_KNOTS``, clipped at 0."""
    wind = np.empty(n_days)
    stationary_sd = WIND_INNOVATION_SD / np.sqrt(1.0 - WIND_AR**2)
    level = WIND_MEAN_KNOTS + stationary_sd * rng.standard_normal()
    for t in range(n_days):
        if t:
            level = (
                WIND_MEAN_KNOTS
                + WIND_AR * (level - WIND_MEAN_KNOTS)
                + WIND_INNOVATION_SD * rng.standard_normal()
            )
        wind[t] = level
    return np.clip(wind, 0.0, None)


def demo_covariates(
    site_groups: tuple[SiteGroup, ...], n_days: int, rng: np.random.Generator
) -> np.ndarray:
    """
    3 x T x S covariates: dumping, dredging, wind.

    Operation indicators are 1 only at sites of the matching group.
    """
    dredging, dumping = demo_schedule(n_days)
    groups = np.array([g.value for g in site_groups])
    at_dump = (groups == SiteGroup.DUMP_SITE.value).astype(float)
    at_dredge = (groups == SiteGroup.DREDGING_SITE.value).astype(float)
    wind = demo_wind(n_days, rng)
    return np.stack(
        [
            np.outer(dumping, at_dump),
            np.outer(dredging, at_dredge),
            np.repeat(wind[:, None], len(site_groups), axis=1),
        ]
    )


def demo_params(variant: ModelVariant, site_groups: tuple[SiteGroup, ...]) -> ParameterSet:
    """True parameters of the demo data for a variant."""
    n_sites = len(site_groups)
    is_dump = np.array([g is SiteGroup.DUMP_SITE for g in site_groups])
    A = np.linspace(6.0, 12.0, n_sites)
    beta = np.vstack(
        [
            np.where(is_dump, 4.0, 0.0),
            np.where(is_dump, 0.0, 3.0),
            np.full(n_sites, 0.3),
        ]
    )
    same_group = is_dump[:, None] == is_dump[None, :]
    if variant.has_full_phi:
        phi = np.where(same_group, 0.05, 0.0)
        np.fill_diagonal(phi, 0.4 if variant is ModelVariant.VARICH else 0.5)
    else:
        phi = np.diag(np.full(n_sites, 0.5))

    if not variant.has_arch_variance:
        sigma = np.where(same_group, 0.8, 0.0)
        np.fill_diagonal(sigma, 3.0)
        return ParameterSet(A=A, beta=beta, Phi=phi, Sigma=sigma)
    theta2 = 0.01 if variant is ModelVariant.VARICH else 0.03
    return ParameterSet(
        A=A,
        beta=beta,
        Phi=phi,
        theta1=np.full(n_sites, 2.0),
        theta2=np.full(n_sites, theta2),
    )


def demo_dataset(
    variant: ModelVariant,
    seed: int,
    n_days: int = DEMO_N_DAYS,
    start_date: str = DEFAULT_START_DATE,
    n_sites: int = DEMO_N_SITES,
) -> tuple[Dataset, ParameterSet]:
    """
    Simulate the demo dataset.

    Returns:
        (dataset, true parameters)
    """
    rng = np.random.default_rng(seed)
    sites, groups = demo_sites(n_sites)
    covariates = demo_covariates(groups, n_days, rng)
    params = demo_params(variant, groups)
    data = simulate(
        ModelSpec(variant=variant),
        params,
        n_days,
        covariates,
        seed=int(rng.integers(2**32)),
        sites=sites,
        site_groups=groups,
        covariate_names=DEFAULT_COVARIATE_NAMES,
        start_date=start_date,
    )
    logger.info(f"Demo dataset: {variant.value}, T={n_days}, S={n_sites}")
    return data, params


def write_raw_fixture(data: Dataset, directory: Path) -> dict[str, Path]:
    """
    Expand a daily dataset into raw sensor files.

    Every observed (day, site) becomes ``READINGS_PER_DAY`` readings at
    15-minute spacing all equal to the daily value (clipped at 0); missing
    cells produce no readings. Wind is taken from the first site's wind
    column, operation dates from the indicator columns.

    Returns:
        Paths of the turbidity, wind and operations files
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    offsets = pd.to_timedelta(np.arange(READINGS_PER_DAY) * 15, unit="min")

    rows = []
    for s, site in enumerate(data.sites):
        for t in np.flatnonzero(~data.mask[:, s]):
            day = pd.Timestamp(data.dates[t]).tz_localize("UTC")
            value = max(float(data.Y[t, s]), 0.0)
            for stamp in day + offsets:
                rows.append((stamp.isoformat(), site, value))
    turbidity = pd.DataFrame(rows, columns=["timestamp", "site", "turbidity_ntu"])

    names = list(data.covariate_names)
    dates = pd.to_datetime(data.dates).strftime("%Y-%m-%d")
    wind_col = names.index("wind_knots") if "wind_knots" in names else None
    wind = pd.DataFrame(
        {
            "date": dates,
            "wind_knots": data.X[wind_col, :, 0] if wind_col is not None else 0.0,
        }
    )
    operations = []
    for operation in ("dredging", "dumping"):
        if operation in names:
            active = data.X[names.index(operation)].max(axis=1) > 0
            operations += [(d, operation) for d in dates[active]]
    ops = pd.DataFrame(sorted(operations), columns=["date", "operation"])

    paths = {
        "turbidity": directory / "turbidity.csv",
        "wind": directory / "wind.csv",
        "operations": directory / "operations.csv",
    }
    atomic_write_text(paths["turbidity"], turbidity.to_csv(index=False))
    atomic_write_text(paths["wind"], wind.to_csv(index=False))
    atomic_write_text(paths["operations"], ops.to_csv(index=False))
    logger.info(f"Raw fixture written to {directory}: {len(turbidity)} readings")
    return paths
