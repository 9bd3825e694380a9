"""
Content hashes and atomic file writes.

Outputs are written to a temporary file in the target directory and moved
into place with os.replace, so readers never see a partial file.
"""

import hashlib
import json
import os
import tempfile
from pathlib import Path

from pydantic import BaseModel

HASH_PREFIX = "sha256:"


def sha256_text(text: str) -> str:
    return HASH_PREFIX + hashlib.sha256(text.encode("utf-8")).hexdigest()


def config_hash(config: BaseModel | dict) -> str:
    """Hash of a configuration's canonical JSON (sorted keys)."""
    payload = config.model_dump(mode="json") if isinstance(config, BaseModel) else config
    return sha256_text(json.dumps(payload, sort_keys=True, separators=(",", ":")))


def atomic_write_text(path: Path, text: str) -> Path:
    """Write ``text`` to ``path`` atomically; parent directories are created."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def atomic_write_json(path: Path, model: BaseModel) -> Path:
    return atomic_write_text(path, model.model_dump_json(indent=2) + "\n")
