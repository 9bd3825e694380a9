"""
Command-line subcommands.

    turbidvar fit       --config run.json [--seed N] [--out DIR]
    turbidvar diagnose  --config run.json [--out DIR]
    turbidvar compare   --config compare.json [--out DIR]
    turbidvar simulate  --config sim.json [--seed N] [--out DIR]
    turbidvar ingest    --config ingest.json [--out DIR]

Each command reads its JSON config, does its work through the services and
writes its outputs atomically into the output directory together with a
manifest.json describing how to rerun it.
"""

import argparse
import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import ValidationError

from turbidvar import __version__
from turbidvar.cli.error_handler import handle_errors
from turbidvar.cli.logging import log_command
from turbidvar.config.run_config import RunConfig, SimulateSection, load_config
from turbidvar.config.settings import Settings, get_settings
from turbidvar.core.exceptions import (
    ConfigError,
    DatasetMismatchError,
    FileNotFoundConfigError,
)
from turbidvar.core.models import ComparisonRow, FitReport, RunManifest
from turbidvar.services.data import dataset_hash, ingest, read_dataset, write_dataset
from turbidvar.services.factory import ServiceFactory
from turbidvar.services.model.dataset import Dataset
from turbidvar.services.model.layout import ParameterSet
from turbidvar.services.report.criteria import PARETO_K_THRESHOLD
from turbidvar.services.report.forecast import multi_step_forecast
from turbidvar.services.report.service import covariate_effects
from turbidvar.services.sampler.service import PosteriorDraws
from turbidvar.services.simulate import demo_dataset, inject_missing, write_raw_fixture
from turbidvar.templates.messages import (
    COMPARE_DONE,
    DIAGNOSE_DONE,
    ERROR_INVALID_OUTPUT,
    ERROR_INVALID_SEED,
    INGEST_DONE,
    SIMULATE_DONE,
    WARN_DIVERGENCES,
    WARN_PARETO_K,
    WARN_RHAT,
)
from turbidvar.utils.formatters import (
    comparison_frame,
    effects_frame,
    forecasts_frame,
    format_comparison,
    format_fit_result,
    summaries_frame,
)
from turbidvar.utils.hashing import atomic_write_json, atomic_write_text, config_hash
from turbidvar.utils.validators import validate_output_dir, validate_seed

logger = logging.getLogger(__name__)

DRAWS_FILE = "draws.csv"
REPORT_FILE = "report.json"
SUMMARY_FILE = "summary.csv"
FORECAST_FILE = "forecast.csv"
FORECAST_AHEAD_FILE = "forecast_ahead.csv"
EFFECTS_FILE = "effects.csv"
COMPARISON_FILE = "comparison.csv"
DATASET_FILE = "dataset.csv"
PARAMETERS_FILE = "parameters.json"
RAW_DIR = "raw"
MANIFEST_FILE = "manifest.json"

RHAT_THRESHOLD = 1.05


# =============================================================================
# Helpers
# =============================================================================


def _frame_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n")


def _load_dataset(config: RunConfig) -> Dataset:
    if config.data.dataset is None:
        raise ConfigError("No dataset configured.", "data.dataset is not set")
    return read_dataset(config.data.dataset, config.data.site_groups)


def _dataset_target(config: RunConfig) -> Path:
    return config.data.dataset or config.output.dir / DATASET_FILE


def _write_manifest(
    command: str,
    config: RunConfig,
    out_dir: Path,
    outputs: list[Path],
    data_hash: str | None = None,
    with_variant: bool = True,
) -> Path:
    manifest = RunManifest(
        command=command,
        version=__version__,
        config_hash=config_hash(config),
        dataset_hash=data_hash,
        seed=config.sampler.seed,
        variant=config.model.variant if with_variant else None,
        outputs=[p.name for p in outputs],
    )
    return atomic_write_json(out_dir / MANIFEST_FILE, manifest)


def _write_report(out_dir: Path, report: FitReport) -> list[Path]:
    return [
        atomic_write_json(out_dir / REPORT_FILE, report),
        atomic_write_text(out_dir / SUMMARY_FILE, _frame_csv(summaries_frame(report.summaries))),
        atomic_write_text(
            out_dir / FORECAST_FILE, _frame_csv(forecasts_frame(report.forecasts))
        ),
    ]


def _warn(report: FitReport) -> None:
    high_rhat = [v for v in report.rhat.values() if v is not None and v >= RHAT_THRESHOLD]
    if high_rhat:
        logger.warning(WARN_RHAT.format(count=len(high_rhat), threshold=RHAT_THRESHOLD))
    if report.telemetry.total_divergences:
        logger.warning(WARN_DIVERGENCES.format(count=report.telemetry.total_divergences))
    if report.looic.flagged_points:
        logger.warning(
            WARN_PARETO_K.format(
                count=len(report.looic.flagged_points), threshold=PARETO_K_THRESHOLD
            )
        )


def _parameters_json(params: ParameterSet) -> str:
    fields = {
        "A": params.A,
        "beta": params.beta,
        "Phi": params.Phi,
        "theta1": params.theta1,
        "theta2": params.theta2,
        "Sigma": params.Sigma,
    }
    document = {k: np.asarray(v).tolist() for k, v in fields.items() if v is not None}
    return json.dumps(document, indent=2) + "\n"


def _read_run(run_dir: Path) -> tuple[FitReport, RunManifest]:
    paths = run_dir / REPORT_FILE, run_dir / MANIFEST_FILE
    for path in paths:
        if not path.is_file():
            raise FileNotFoundConfigError(str(path))
    try:
        report = FitReport.model_validate_json(paths[0].read_text(encoding="utf-8"))
        manifest = RunManifest.model_validate_json(paths[1].read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ConfigError(
            "Run directory holds an unreadable report.", f"{run_dir}: {e.error_count()} errors"
        ) from None
    return report, manifest


# =============================================================================
# Commands
# =============================================================================


@log_command("fit")
def cmd_fit(config: RunConfig, settings: Settings) -> int:
    """Sample one variant and write draws, report, summary and forecasts."""
    data = _load_dataset(config)
    spec = config.model_spec()
    orchestrator = ServiceFactory(settings).create_orchestrator()
    result = orchestrator.fit(spec, data, config.sampler)

    out_dir = config.output.dir
    outputs = [
        atomic_write_text(out_dir / DRAWS_FILE, _frame_csv(result.draws.to_frame())),
        *_write_report(out_dir, result.report),
        atomic_write_text(
            out_dir / EFFECTS_FILE,
            _frame_csv(effects_frame(covariate_effects(result.draws, data))),
        ),
    ]
    if config.output.horizon:
        ahead = multi_step_forecast(
            result.draws, spec, data, config.output.horizon, seed=config.sampler.seed
        )
        outputs.append(
            atomic_write_text(out_dir / FORECAST_AHEAD_FILE, _frame_csv(forecasts_frame(ahead)))
        )
    _write_manifest("fit", config, out_dir, outputs, dataset_hash(data))
    _warn(result.report)
    print(format_fit_result(result.report, str(out_dir)))
    return 0


@log_command("diagnose")
def cmd_diagnose(config: RunConfig, settings: Settings) -> int:
    """Rebuild the report of a saved draws file in the output directory."""
    data = _load_dataset(config)
    spec = config.model_spec()
    out_dir = config.output.dir
    draws_path = out_dir / DRAWS_FILE
    if not draws_path.is_file():
        raise FileNotFoundConfigError(str(draws_path))
    draws = PosteriorDraws.from_frame(pd.read_csv(draws_path))
    logger.info(f"Loaded {draws.n_chains} chains x {draws.n_draws} draws from {draws_path}")

    orchestrator = ServiceFactory(settings).create_orchestrator()
    report = orchestrator.diagnose(draws, spec, data, seed=config.sampler.seed)
    outputs = [draws_path, *_write_report(out_dir, report)]
    _write_manifest("diagnose", config, out_dir, outputs, dataset_hash(data))
    _warn(report)
    low, high = report.rhat_range()
    print(
        DIAGNOSE_DONE.format(
            variant=report.variant.value,
            n_chains=report.n_chains,
            n_draws=report.n_draws,
            rhat_low=low,
            rhat_high=high,
            path=out_dir / REPORT_FILE,
        )
    )
    return 0


@log_command("compare")
def cmd_compare(config: RunConfig, settings: Settings) -> int:
    """
    Tabulate WAIC, LOO-IC and spectral radius of earlier fits.

    Raises:
        ConfigError: With fewer than two runs
        DatasetMismatchError: If the runs were fitted to different data
    """
    if len(config.runs) < 2:
        raise ConfigError(
            "compare needs at least two runs.", f"runs lists {len(config.runs)} directories"
        )
    rows = []
    hashes = {}
    for run_dir in config.runs:
        report, manifest = _read_run(run_dir)
        hashes[str(run_dir)] = manifest.dataset_hash
        rows.append(
            ComparisonRow(
                model=report.variant.value,
                waic=report.waic.waic,
                waic_se=report.waic.se,
                looic=report.looic.looic,
                looic_se=report.looic.se,
                spectral_radius=report.spectral_radius,
            )
        )
    if len(set(hashes.values())) != 1:
        raise DatasetMismatchError(
            "Runs were fitted to different datasets.",
            ", ".join(f"{run}={h}" for run, h in hashes.items()),
        )

    frame = comparison_frame(rows)
    out_dir = config.output.dir
    path = atomic_write_text(out_dir / COMPARISON_FILE, _frame_csv(frame))
    _write_manifest(
        "compare", config, out_dir, [path], next(iter(hashes.values())), with_variant=False
    )
    print(COMPARE_DONE.format(n_models=len(rows), table=format_comparison(frame), path=path))
    return 0


@log_command("simulate")
def cmd_simulate(config: RunConfig, settings: Settings) -> int:
    """Simulate the demo dataset for a variant and write it with its true parameters."""
    section = config.data.simulate or SimulateSection()
    seed = config.sampler.seed
    data, params = demo_dataset(
        section.variant,
        seed=seed,
        n_days=section.n_days,
        start_date=section.start_date,
        n_sites=section.n_sites,
    )
    data = inject_missing(
        data, section.missing_fraction, section.missing_blocks, seed=seed + 1
    )

    out_dir = config.output.dir
    path = write_dataset(data, _dataset_target(config))
    outputs = [path, atomic_write_text(out_dir / PARAMETERS_FILE, _parameters_json(params))]
    if section.raw_fixture:
        outputs.extend(write_raw_fixture(data, out_dir / RAW_DIR).values())
    _write_manifest("simulate", config, out_dir, outputs, dataset_hash(data), with_variant=False)
    print(
        SIMULATE_DONE.format(
            variant=section.variant.value,
            n_times=data.n_times,
            n_sites=data.n_sites,
            n_missing=data.n_missing,
            path=path,
        )
    )
    return 0


@log_command("ingest")
def cmd_ingest(config: RunConfig, settings: Settings) -> int:
    """Build a dataset file from raw turbidity, wind and operations files."""
    section = config.data.ingest
    if section is None:
        raise ConfigError("No raw files configured.", "data.ingest is not set")
    data = ingest(
        section.turbidity,
        section.wind,
        section.operations,
        section.site_groups,
        min_readings=section.min_readings,
    )
    path = write_dataset(data, _dataset_target(config))
    _write_manifest(
        "ingest", config, config.output.dir, [path], dataset_hash(data), with_variant=False
    )
    print(
        INGEST_DONE.format(
            n_times=data.n_times, n_sites=data.n_sites, n_missing=data.n_missing, path=path
        )
    )
    return 0


COMMANDS = {
    "fit": cmd_fit,
    "diagnose": cmd_diagnose,
    "compare": cmd_compare,
    "simulate": cmd_simulate,
    "ingest": cmd_ingest,
}


# =============================================================================
# Entry
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="turbidvar",
        description="Bayesian VAR/ARCH models for multi-site turbidity series.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, command in COMMANDS.items():
        sub = subparsers.add_parser(name, help=(command.__doc__ or "").strip().splitlines()[0])
        sub.add_argument("--config", type=Path, help="JSON run configuration")
        sub.add_argument("--seed", help="Overrides sampler.seed")
        sub.add_argument("--out", type=Path, help="Overrides output.dir")
    return parser


def prepare_config(
    config_path: Path | None, seed: str | None, out_dir: Path | None
) -> RunConfig:
    """
    Load the config file (defaults when None) and apply command-line overrides.

    Raises:
        ConfigError: Invalid config, seed or output directory
    """
    config = load_config(config_path) if config_path is not None else RunConfig()
    seed_value = None
    if seed is not None:
        ok, error = validate_seed(seed)
        if not ok:
            raise ConfigError(ERROR_INVALID_SEED.format(detail=error), error)
        seed_value = int(seed)
    config = config.with_overrides(seed=seed_value, out_dir=out_dir)
    ok, error = validate_output_dir(config.output.dir)
    if not ok:
        raise ConfigError(ERROR_INVALID_OUTPUT.format(detail=error), error)
    return config


@handle_errors
def dispatch(args: argparse.Namespace, settings: Settings) -> int:
    config = prepare_config(args.config, args.seed, args.out)
    return COMMANDS[args.command](config, settings)


def run(argv: list[str] | None = None, settings: Settings | None = None) -> int:
    """
    Parse ``argv`` and run one subcommand.

    Returns:
        Process exit code (0, 2 or 3)
    """
    args = build_parser().parse_args(argv)
    return dispatch(args, settings or get_settings())
