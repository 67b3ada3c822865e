"""
Experiment Settings
===================
Parses, defaults and range-checks experiment configuration documents.

A document is JSON naming an ``experiment`` (one of the presets in
config/presets.json) and overriding any of its keys:

    {
      "experiment": "gaussian-decay",
      "chain":  {"n_sites": 20, "profile": {"kind": "gaussian"},
                 "precision_bits": 53, "fallback_bits": [256, 1024], "field": 0.0},
      "scan":   {"block_sizes": null, "block_min": null, "block_max": null,
                 "samples": 1, "delta": 5.0},
      "output": {"dir": "gaussian-decay", "dump_correlation": false},
      "oracle": {"convention": "unit"},
      "seed": 0
    }
"""

import copy
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping

from src.chain.precision import Precision
from src.chain.profiles import CouplingProfile
from src.config import (
    DEFAULT_PRECISION_BITS,
    DOUBLE_BITS,
    ORACLE_MAX_SITES,
    OUTPUT_DIR,
    PRESETS_FILE,
)
from src.errors import ChainsError, InvalidConfig
from src.fermions.fallback import DEFAULT_LADDER
from src.oracle.hamiltonian import Convention
from src.rg.scaling import log_spaced_block_sizes


class ExperimentKind(str, Enum):
    GAUSSIAN_DECAY = "gaussian-decay"
    EXPONENTIAL_DECAY = "exponential-decay"
    ORACLE_COMPARE = "oracle-compare"
    CONCENTRIC_AVERAGE = "concentric-average"
    RANDOM_SINGLET = "random-singlet"
    CUSTOM = "custom"


# Names the experiments went by in the original figure scripts.
EXPERIMENT_ALIASES = {
    "fig4a": ExperimentKind.GAUSSIAN_DECAY,
    "fig4b": ExperimentKind.EXPONENTIAL_DECAY,
    "rsp-scaling": ExperimentKind.RANDOM_SINGLET,
}

CONCENTRIC_KINDS = {
    ExperimentKind.GAUSSIAN_DECAY,
    ExperimentKind.EXPONENTIAL_DECAY,
    ExperimentKind.CONCENTRIC_AVERAGE,
    ExperimentKind.CUSTOM,
}

_U64_MAX = 2**64 - 1

BASE_DEFAULTS = {
    "chain": {
        "n_sites": 20,
        "profile": {"kind": "gaussian"},
        "precision_bits": DEFAULT_PRECISION_BITS,
        "fallback_bits": list(DEFAULT_LADDER),
        "field": 0.0,
    },
    "scan": {"block_sizes": None, "block_min": None, "block_max": None, "samples": 1, "delta": 5.0},
    "output": {"dir": None, "dump_correlation": False},
    "oracle": {"convention": Convention.UNIT.value},
    "seed": 0,
}

# Nested dicts list the allowed keys; None marks a leaf.
_SCHEMA = {
    "experiment": None,
    "description": None,
    "chain": {"n_sites": None, "profile": None, "precision_bits": None, "fallback_bits": None, "field": None},
    "scan": {"block_sizes": None, "block_min": None, "block_max": None, "samples": None, "delta": None},
    "output": {"dir": None, "dump_correlation": None},
    "oracle": {"convention": None},
    "seed": None,
}

_presets: dict | None = None


def load_presets(path: Path = PRESETS_FILE) -> dict:
    """Lazy-load the preset table."""
    global _presets
    if _presets is None or path != PRESETS_FILE:
        with open(path, "r", encoding="utf-8") as f:
            presets = json.load(f)
        if path != PRESETS_FILE:
            return presets
        _presets = presets
    return _presets


def preset_names() -> list[str]:
    return list(load_presets())


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: ExperimentKind
    n_sites: int
    profile: CouplingProfile
    precision_bits: int
    fallback_bits: tuple
    field: float
    block_sizes: tuple | None
    samples: int
    delta: float
    seed: int
    output_dir: Path
    dump_correlation: bool
    convention: Convention
    document: dict

    @property
    def precision(self) -> Precision:
        return Precision(self.precision_bits)

    def to_document(self) -> dict:
        return copy.deepcopy(self.document)


# ─── Parsing helpers ─────────────────────────────────────────────────────────

def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    needle = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def _check_keys(document: Mapping, schema: Mapping, text: str | None, prefix: str = ""):
    for key, value in document.items():
        path = f"{prefix}{key}"
        if key not in schema:
            raise InvalidConfig(f"unknown key '{key}'", field=path, line=_line_of(text, key))
        if schema[key] is not None:
            if not isinstance(value, Mapping):
                raise InvalidConfig("expected an object", field=path, line=_line_of(text, key))
            _check_keys(value, schema[key], text, prefix=f"{path}.")


def _merge(base: dict, override: Mapping) -> dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if key != "profile" and isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _int(value, field: str, text: str | None, lo: int | None = None, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidConfig(f"expected an integer, got {value!r}", field=field, line=_line_of(text, field.split(".")[-1]))
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        bounds = f"[{lo if lo is not None else '-inf'}, {hi if hi is not None else 'inf'}]"
        raise InvalidConfig(f"{value} outside {bounds}", field=field, line=_line_of(text, field.split(".")[-1]))
    return value


def _float(value, field: str, text: str | None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise InvalidConfig(f"expected a finite number, got {value!r}", field=field, line=_line_of(text, field.split(".")[-1]))
    return float(value)


# ─── validate_config ─────────────────────────────────────────────────────────

def validate_config(document, overrides: Mapping | None = None) -> ExperimentConfig:
    """
    Parse (JSON text or mapping), default from the named preset, apply CLI
    overrides (``precision_bits``, ``seed``, ``output_dir``) and range-check.
    """
    text = None
    if isinstance(document, (str, bytes)):
        text = document.decode("utf-8") if isinstance(document, bytes) else document
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidConfig(f"{e.msg} (column {e.colno})", line=e.lineno) from e
    if not isinstance(document, Mapping):
        raise InvalidConfig("config document must be a JSON object")

    _check_keys(document, _SCHEMA, text)

    name = document.get("experiment")
    if isinstance(name, str):
        name = EXPERIMENT_ALIASES.get(name, name)
    try:
        kind = ExperimentKind(name)
    except ValueError:
        raise InvalidConfig(
            f"unknown experiment {name!r}; choose one of {preset_names()}",
            field="experiment",
            line=_line_of(text, "experiment"),
        )

    resolved = _merge(BASE_DEFAULTS, load_presets().get(kind.value, {}))
    resolved = _merge(resolved, document)
    resolved["experiment"] = kind.value
    resolved.pop("description", None)

    overrides = overrides or {}
    if overrides.get("precision_bits") is not None:
        resolved["chain"]["precision_bits"] = overrides["precision_bits"]
    if overrides.get("seed") is not None:
        resolved["seed"] = overrides["seed"]
    if overrides.get("output_dir") is not None:
        resolved["output"]["dir"] = str(overrides["output_dir"])

    user_scan = document.get("scan")
    supplied = frozenset(user_scan) if isinstance(user_scan, Mapping) else frozenset()
    return _build(kind, resolved, text, supplied)


def _build(kind: ExperimentKind, doc: dict, text: str | None, supplied: frozenset = frozenset()) -> ExperimentConfig:
    chain, scan, output = doc["chain"], doc["scan"], doc["output"]

    n_sites = _int(chain["n_sites"], "chain.n_sites", text, lo=2)
    if kind in CONCENTRIC_KINDS and n_sites % 2:
        raise InvalidConfig(f"concentric experiments need an even number of sites, got {n_sites}",
                            field="chain.n_sites", line=_line_of(text, "n_sites"))
    if kind == ExperimentKind.ORACLE_COMPARE and n_sites > ORACLE_MAX_SITES:
        raise InvalidConfig(f"oracle comparison is capped at {ORACLE_MAX_SITES} sites",
                            field="chain.n_sites", line=_line_of(text, "n_sites"))
    if kind == ExperimentKind.RANDOM_SINGLET and n_sites % 2:
        raise InvalidConfig("decimation needs an even number of sites", field="chain.n_sites",
                            line=_line_of(text, "n_sites"))

    precision_bits = _int(chain["precision_bits"], "chain.precision_bits", text, lo=DOUBLE_BITS)
    fallback = chain["fallback_bits"]
    if not isinstance(fallback, list):
        raise InvalidConfig("expected a list of integers", field="chain.fallback_bits", line=_line_of(text, "fallback_bits"))
    fallback_bits = tuple(_int(b, "chain.fallback_bits", text, lo=DOUBLE_BITS) for b in fallback)
    field = _float(chain["field"], "chain.field", text)

    try:
        profile = CouplingProfile.from_document(chain["profile"])
    except ChainsError as e:
        raise InvalidConfig(str(e), field="chain.profile", line=_line_of(text, "profile")) from e
    except (TypeError, AttributeError) as e:
        raise InvalidConfig(f"profile must be an object: {e}", field="chain.profile", line=_line_of(text, "profile")) from e

    samples = _int(scan["samples"], "scan.samples", text, lo=1)
    delta = _float(scan["delta"], "scan.delta", text)
    if delta < 1:
        raise InvalidConfig(f"delta must be >= 1, got {delta}", field="scan.delta", line=_line_of(text, "delta"))
    block_sizes = _block_sizes(kind, scan, n_sites, text, supplied)

    seed = _int(doc["seed"], "seed", text, lo=0, hi=_U64_MAX)

    out = output["dir"] or kind.value
    output_dir = Path(out)
    if not output_dir.is_absolute():
        output_dir = OUTPUT_DIR / output_dir
    dump = output["dump_correlation"]
    if not isinstance(dump, bool):
        raise InvalidConfig("expected true or false", field="output.dump_correlation",
                            line=_line_of(text, "dump_correlation"))

    try:
        convention = Convention(doc["oracle"]["convention"])
    except ValueError:
        raise InvalidConfig(f"convention must be one of {[c.value for c in Convention]}",
                            field="oracle.convention", line=_line_of(text, "convention"))

    return ExperimentConfig(
        experiment=kind,
        n_sites=n_sites,
        profile=profile,
        precision_bits=precision_bits,
        fallback_bits=fallback_bits,
        field=field,
        block_sizes=block_sizes,
        samples=samples,
        delta=delta,
        seed=seed,
        output_dir=output_dir,
        dump_correlation=dump,
        convention=convention,
        document=doc,
    )


def _block_sizes(kind: ExperimentKind, scan: dict, n_sites: int, text: str | None,
                 supplied: frozenset = frozenset()) -> tuple | None:
    """``supplied`` names the scan keys the user wrote; preset bounds are clamped to the chain."""
    if scan["block_sizes"] is not None:
        sizes = scan["block_sizes"]
        if not isinstance(sizes, list) or not sizes:
            raise InvalidConfig("expected a non-empty list of integers", field="scan.block_sizes",
                                line=_line_of(text, "block_sizes"))
        return tuple(sorted(set(_int(s, "scan.block_sizes", text, lo=1, hi=n_sites - 1) for s in sizes)))

    lo, hi = scan["block_min"], scan["block_max"]
    if lo is None and hi is None:
        return None
    for key in ("block_min", "block_max"):
        value = scan[key]
        if key not in supplied and isinstance(value, int) and value > n_sites - 1:
            scan = {**scan, key: n_sites - 1}
    lo, hi = scan["block_min"], scan["block_max"]
    lo = _int(1 if lo is None else lo, "scan.block_min", text, lo=1, hi=n_sites - 1)
    hi = _int(n_sites - 1 if hi is None else hi, "scan.block_max", text, lo=lo, hi=n_sites - 1)
    if kind == ExperimentKind.RANDOM_SINGLET:
        return tuple(log_spaced_block_sizes(lo, hi))
    return tuple(range(lo, hi + 1))
