"""
Run configuration.

A run is described by one JSON document:

    {
      "data":    {"dataset": "data/dataset.csv", "site_groups": {...}},
      "model":   {"variant": "VARICH"},
      "priors":  {"nu": 14},
      "sampler": {"n_iter": 1000, "n_warmup": 200, "seed": 1},
      "output":  {"dir": "runs/varich"},
      "runs":    ["runs/arch", "runs/varich"]
    }

Every section is optional except where a command needs it. Unknown keys
are rejected.
"""

import json
import logging
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from turbidvar.core.exceptions import ConfigError, FileNotFoundConfigError
from turbidvar.core.models import (
    DEFAULT_COVARIATE_ROLES,
    CovariateRole,
    MissingBlock,
    ModelSpec,
    ModelVariant,
    PriorConfig,
    SamplerConfig,
    SiteGroup,
)
from turbidvar.services.simulate.demo import DEMO_N_DAYS
from turbidvar.services.simulate.generator import DEFAULT_START_DATE

logger = logging.getLogger(__name__)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class IngestSection(_Section):
    """Raw sensor files for ``ingest``."""

    turbidity: Path
    wind: Path
    operations: Path
    site_groups: dict[str, SiteGroup]
    min_readings: int = Field(default=1, gt=0)


class SimulateSection(_Section):
    """Synthetic data for ``simulate``."""

    variant: ModelVariant = ModelVariant.VARICH
    n_sites: int = Field(default=7, gt=0)
    n_days: int = Field(default=DEMO_N_DAYS, ge=3)
    start_date: str = DEFAULT_START_DATE
    missing_fraction: float = Field(default=0.0, ge=0.0, lt=1.0)
    missing_blocks: list[MissingBlock] = Field(default_factory=list)
    raw_fixture: bool = False
    """Also write raw turbidity, wind and operations files next to the dataset"""


class DataSection(_Section):
    dataset: Path | None = None
    site_groups: dict[str, SiteGroup] | None = None
    ingest: IngestSection | None = None
    simulate: SimulateSection | None = None


class ModelSection(_Section):
    variant: ModelVariant = ModelVariant.VARICH
    covariate_roles: tuple[CovariateRole, ...] = DEFAULT_COVARIATE_ROLES


class OutputSection(_Section):
    dir: Path = Path("out")
    horizon: int = Field(default=0, ge=0)
    """Days of multi-step forecast written after a fit; 0 disables it"""


class RunConfig(_Section):
    """The whole JSON document."""

    data: DataSection = Field(default_factory=DataSection)
    model: ModelSection = Field(default_factory=ModelSection)
    priors: PriorConfig = Field(default_factory=PriorConfig)
    sampler: SamplerConfig = Field(default_factory=SamplerConfig)
    output: OutputSection = Field(default_factory=OutputSection)
    runs: list[Path] = Field(default_factory=list)
    """Output directories of earlier fits, for ``compare``"""

    def model_spec(self) -> ModelSpec:
        return ModelSpec(
            variant=self.model.variant,
            priors=self.priors,
            covariate_roles=self.model.covariate_roles,
        )

    def with_overrides(
        self, seed: int | None = None, out_dir: Path | None = None
    ) -> "RunConfig":
        """Apply ``--seed`` and ``--out`` from the command line."""
        config = self
        if seed is not None:
            try:
                sampler = SamplerConfig.model_validate(
                    {**self.sampler.model_dump(), "seed": seed}
                )
            except ValidationError as e:
                raise ConfigError("Invalid seed.", _describe(e)) from None
            config = config.model_copy(update={"sampler": sampler})
        if out_dir is not None:
            config = config.model_copy(
                update={"output": self.output.model_copy(update={"dir": out_dir})}
            )
        return config

    def resolve_paths(self, base: Path) -> "RunConfig":
        """Make relative data paths relative to ``base`` (the config's folder)."""

        def resolve(path: Path | None) -> Path | None:
            if path is None or path.is_absolute():
                return path
            return base / path

        data = self.data
        ingest = data.ingest
        if ingest is not None:
            ingest = ingest.model_copy(
                update={
                    "turbidity": resolve(ingest.turbidity),
                    "wind": resolve(ingest.wind),
                    "operations": resolve(ingest.operations),
                }
            )
        data = data.model_copy(update={"dataset": resolve(data.dataset), "ingest": ingest})
        return self.model_copy(
            update={
                "data": data,
                "output": self.output.model_copy(update={"dir": resolve(self.output.dir)}),
                "runs": [resolve(r) for r in self.runs],
            }
        )


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def parse_config(document: dict) -> RunConfig:
    """
    Validate a config document.

    Raises:
        ConfigError: If any section is invalid
    """
    try:
        return RunConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError("Invalid configuration.", _describe(e)) from None


def load_config(path: Path | str) -> RunConfig:
    """
    Read and validate a JSON config file.

    Relative paths inside the file are taken relative to its folder.

    Raises:
        FileNotFoundConfigError: If the file does not exist
        ConfigError: If the file is not valid JSON or fails validation
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundConfigError(str(path))
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(
            "Config file is not valid JSON.", f"{path}: line {e.lineno}: {e.msg}"
        ) from None
    if not isinstance(document, dict):
        raise ConfigError("Config file must hold a JSON object.", f"{path}")
    config = parse_config(document).resolve_paths(path.parent)
    logger.debug(f"Loaded config {path}: variant={config.model.variant.value}")
    return config
