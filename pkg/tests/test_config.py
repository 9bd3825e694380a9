"""
Tests for process settings and run configuration.

Tests cover:
- Environment variables read by Settings
- Validation of the JSON run config
- Relative path resolution and command-line overrides
"""

import json
from pathlib import Path

import pytest

from turbidvar.config.run_config import RunConfig, load_config, parse_config
from turbidvar.config.settings import Settings
from turbidvar.core.exceptions import ConfigError, FileNotFoundConfigError
from turbidvar.core.models import ModelVariant, SiteGroup


class TestSettings:
    """Tests for Settings."""

    def test_defaults(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.delenv("TURBIDVAR_MAX_WORKERS", raising=False)
        settings = Settings(_env_file=None)
        assert settings.max_workers == 4
        assert settings.forecast_draws == 1000
        assert settings.log_level == "INFO"

    def test_fields(self) -> None:
        """Only settings read by the services exist."""
        assert set(Settings.model_fields) == {"log_level", "max_workers", "forecast_draws"}

    def test_environment_prefix(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """TURBIDVAR_* variables override the defaults."""
        monkeypatch.setenv("TURBIDVAR_MAX_WORKERS", "2")
        monkeypatch.setenv("TURBIDVAR_LOG_LEVEL", "DEBUG")
        settings = Settings(_env_file=None)
        assert settings.max_workers == 2
        assert settings.log_level == "DEBUG"

    def test_rejects_zero_workers(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("TURBIDVAR_MAX_WORKERS", "0")
        with pytest.raises(ValueError):
            Settings(_env_file=None)


class TestParseConfig:
    """Tests for parse_config."""

    def test_empty_document(self) -> None:
        """Every section has defaults."""
        config = parse_config({})
        assert config.model.variant is ModelVariant.VARICH
        assert config.sampler.n_chains == 4
        assert config.output.dir == Path("out")
        assert config.runs == []

    def test_sections(self) -> None:
        config = parse_config(
            {
                "data": {"dataset": "d.csv", "site_groups": {"a": "DumpSite"}},
                "model": {"variant": "ARCH"},
                "priors": {"nu": 20},
                "sampler": {"n_iter": 100, "n_warmup": 50, "seed": 3},
            }
        )
        assert config.data.site_groups == {"a": SiteGroup.DUMP_SITE}
        spec = config.model_spec()
        assert spec.variant is ModelVariant.ARCH
        assert spec.priors.nu == 20
        assert config.sampler.seed == 3

    @pytest.mark.parametrize(
        "document",
        [
            {"modle": {}},
            {"sampler": {"n_iters": 10}},
            {"model": {"variant": "GARCH"}},
            {"sampler": {"n_iter": 100, "n_warmup": 100}},
            {"priors": {"missing_lower": 5, "missing_upper": 1}},
            {"data": {"simulate": {"missing_fraction": 1.0}}},
        ],
    )
    def test_invalid(self, document: dict) -> None:
        with pytest.raises(ConfigError):
            parse_config(document)

    def test_error_names_the_field(self) -> None:
        with pytest.raises(ConfigError) as info:
            parse_config({"sampler": {"target_accept": 2.0}})
        assert "sampler.target_accept" in info.value.technical_message


class TestLoadConfig:
    """Tests for load_config."""

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(FileNotFoundConfigError):
            load_config(tmp_path / "nope.json")

    def test_not_json(self, tmp_path: Path) -> None:
        path = tmp_path / "run.json"
        path.write_text("{model: ARCH}")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_not_an_object(self, tmp_path: Path) -> None:
        path = tmp_path / "run.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_relative_paths(self, tmp_path: Path) -> None:
        """Paths are taken relative to the config's folder."""
        folder = tmp_path / "cfg"
        folder.mkdir()
        path = folder / "run.json"
        document = {
            "data": {"dataset": "data/d.csv"},
            "output": {"dir": "out"},
            "runs": ["runs/a", str(tmp_path / "abs")],
        }
        path.write_text(json.dumps(document))
        config = load_config(path)
        assert config.data.dataset == folder / "data" / "d.csv"
        assert config.output.dir == folder / "out"
        assert config.runs == [folder / "runs" / "a", tmp_path / "abs"]

    def test_ingest_paths(self, tmp_path: Path) -> None:
        path = tmp_path / "ingest.json"
        document = {
            "data": {
                "ingest": {
                    "turbidity": "raw/t.csv",
                    "wind": "raw/w.csv",
                    "operations": "raw/o.csv",
                    "site_groups": {"north": "DredgingSite"},
                }
            }
        }
        path.write_text(json.dumps(document))
        ingest = load_config(path).data.ingest
        assert ingest.turbidity == tmp_path / "raw" / "t.csv"
        assert ingest.operations == tmp_path / "raw" / "o.csv"
        assert ingest.min_readings == 1


class TestOverrides:
    """Tests for RunConfig.with_overrides."""

    def test_seed_and_out(self, tmp_path: Path) -> None:
        config = RunConfig().with_overrides(seed=99, out_dir=tmp_path)
        assert config.sampler.seed == 99
        assert config.output.dir == tmp_path
        assert RunConfig().sampler.seed == 20170831

    def test_no_overrides(self) -> None:
        config = RunConfig()
        assert config.with_overrides() == config

    def test_negative_seed(self) -> None:
        with pytest.raises(ConfigError):
            RunConfig().with_overrides(seed=-1)
