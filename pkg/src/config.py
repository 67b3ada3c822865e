"""
Configuration
=============
Central config for paths, numerical tolerances and runtime settings.
Overrides are loaded from a .env file or environment variables.
"""

import logging
import os
from pathlib import Path

from dotenv import load_dotenv

# ─── Paths ────────────────────────────────────────────────────────────────────

ROOT_DIR = Path(__file__).resolve().parent.parent
CONFIG_DIR = ROOT_DIR / "config"
PRESETS_FILE = CONFIG_DIR / "presets.json"

# ─── Load .env ────────────────────────────────────────────────────────────────

# Variables already present in the environment win over the file.
load_dotenv(ROOT_DIR / ".env", override=False)

_log = logging.getLogger("Config")


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(name, "").strip()
    if not value:
        return default
    try:
        return int(value)
    except ValueError:
        _log.warning(f"Ignoring {name}={value!r}, not an integer")
        return default


def _env_float(name: str, default: float) -> float:
    value = os.environ.get(name, "").strip()
    if not value:
        return default
    try:
        return float(value)
    except ValueError:
        _log.warning(f"Ignoring {name}={value!r}, not a number")
        return default


# ─── Runtime Settings ────────────────────────────────────────────────────────

LOG_LEVEL = os.environ.get("CHAINS_LOG_LEVEL", "INFO").upper()
OUTPUT_DIR = Path(os.environ.get("CHAINS_OUTPUT_DIR", str(ROOT_DIR / "runs")))

# 53 mantissa bits = IEEE double; anything larger goes through mpmath
DOUBLE_BITS = 53
DEFAULT_PRECISION_BITS = _env_int("CHAINS_PRECISION_BITS", DOUBLE_BITS)

# ─── Numerical Tolerances ────────────────────────────────────────────────────

# Relative threshold below which a Bogoliubov energy counts as a zero mode
ZERO_MODE_TOLERANCE = _env_float("CHAINS_ZERO_MODE_TOLERANCE", 1e-12)

# Zero-mode threshold at extended precision is 2**(ZERO_MODE_GUARD_BITS - bits)
ZERO_MODE_GUARD_BITS = 13

ORTHONORMALITY_TOLERANCE = 1e-10
SVD_RESIDUAL_TOLERANCE = 1e-8

# ν outside [0, 1] by more than this is an error, not rounding
NU_CLIP_TOLERANCE = 1e-8

# Negative density-matrix eigenvalues above -this are rounding
DENSITY_CLIP_TOLERANCE = 1e-10

# Ground gap below this fraction of the spectral range counts as degenerate
DEGENERACY_GAP_RATIO = 1e-10

# Entries of T below this fraction of max|T| are ignored by the decay fit
DECAY_FIT_FLOOR = 1e-12

# β̂ classification band
BETA_CLASS_TOLERANCE = 1e-9

# Run-time invariant checks
ENTROPY_BOUND_TOLERANCE = 1e-9
COMPLEMENT_TOLERANCE = 1e-8
ROW_NORM_TOLERANCE = 1e-8
ORACLE_AGREEMENT_TOLERANCE = 1e-8
CONCENTRIC_AVERAGE_TOLERANCE = 1.0

# ─── Oracle ──────────────────────────────────────────────────────────────────

ORACLE_MAX_SITES = _env_int("CHAINS_ORACLE_MAX_SITES", 14)

# ─── Output ──────────────────────────────────────────────────────────────────

# 17 significant digits round-trip every double
CSV_FLOAT_FORMAT = "{:.17g}"

# ─── Logging ─────────────────────────────────────────────────────────────────

_LOG_FORMAT = "  [%(name)s] %(message)s"
_logging_ready = False


def setup_logging(level: str | None = None, force: bool = False):
    """Install the tagged console format once per process."""
    global _logging_ready
    if _logging_ready and not force:
        return
    logging.basicConfig(
        level=(level or LOG_LEVEL),
        format=_LOG_FORMAT,
        force=force,
    )
    _logging_ready = True


def get_logger(tag: str) -> logging.Logger:
    """Logger named after a short component tag, e.g. ``get_logger("Solver")``."""
    return logging.getLogger(tag)
