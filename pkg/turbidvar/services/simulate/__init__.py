"""Synthetic datasets from known parameters."""

from turbidvar.services.simulate.demo import demo_dataset, write_raw_fixture
from turbidvar.services.simulate.generator import inject_missing, simulate

__all__ = ["demo_dataset", "inject_missing", "simulate", "write_raw_fixture"]
