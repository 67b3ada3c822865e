"""
Run Artifacts
=============
CSV and JSON writers plus the per-run manifest. Floats are written with 17
significant digits so every value round-trips.
"""

import csv
import datetime
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src import __version__
from src.config import CSV_FLOAT_FORMAT

MANIFEST_NAME = "manifest.json"


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return CSV_FLOAT_FORMAT.format(value)
    if value is None:
        return ""
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, Path):
        return str(value)
    return value


def write_csv(path: Path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_json(path: Path, document) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(document), indent=2) + "\n", encoding="utf-8")
    return path


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).replace(microsecond=0).isoformat()


@dataclass
class RunManifest:
    """Config echo, version, timestamp, hashes of every data file, warnings."""

    config: dict
    version: str = __version__
    timestamp: str = field(default_factory=_utc_now)
    files: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    status: str = "running"
    failed_stage: str | None = None
    error: dict | None = None
    results: dict = field(default_factory=dict)

    def record(self, path: Path):
        """Hash a written data file into the manifest."""
        path = Path(path)
        self.files[path.name] = sha256_file(path)

    def warn(self, message: str):
        self.warnings.append(message)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        return _jsonable({
            "config": self.config,
            "version": self.version,
            "timestamp": self.timestamp,
            "files": dict(sorted(self.files.items())),
            "warnings": self.warnings,
            "status": self.status,
            "failed_stage": self.failed_stage,
            "error": self.error,
            "results": self.results,
        })

    def write(self, directory: Path) -> Path:
        return write_json(Path(directory) / MANIFEST_NAME, self.to_dict())
