from turbidvar.services.data.io import (
    dataset_hash,
    dataset_to_csv,
    read_dataset,
    write_dataset,
)
from turbidvar.services.data.pipeline import (
    aggregate_daily,
    build_dataset,
    ingest,
    load_operations,
    load_raw,
    load_wind,
)

__all__ = [
    "aggregate_daily",
    "build_dataset",
    "dataset_hash",
    "dataset_to_csv",
    "ingest",
    "load_operations",
    "load_raw",
    "load_wind",
    "read_dataset",
    "write_dataset",
]
