"""
Random-Singlet Scaling
======================
Disorder- and position-averaged bond-cut entropy of an ensemble of
pairings, fitted against log2 L. In the random singlet phase the slope
approaches ln(2)/3 bits.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from src.chain.profiles import sample_strong_disorder_chain
from src.config import get_logger
from src.errors import FitUnderdetermined
from src.rg.decimation import decimate
from src.rg.pairing import SingletPairing, position_averaged_pairing_entropy

log = get_logger("RG")

RANDOM_SINGLET_SLOPE = math.log(2.0) / 3.0


@dataclass(frozen=True)
class ScalingRow:
    block_len: int
    mean_entropy_bits: float
    stderr: float


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    rows: tuple

    def summary_rows(self) -> list[tuple]:
        return [(r.block_len, r.mean_entropy_bits, r.stderr) for r in self.rows]


def log_spaced_block_sizes(lo: int, hi: int, count: int = 13) -> list[int]:
    """Distinct integers spread evenly in log L between lo and hi inclusive."""
    return sorted(set(int(round(x)) for x in np.geomspace(lo, hi, count)))


def strong_disorder_ensemble(n_sites: int, delta: float, seeds) -> list[SingletPairing]:
    """Decimate one strong-disorder chain per seed."""
    ensemble = [decimate(sample_strong_disorder_chain(n_sites, delta, int(seed))) for seed in seeds]
    log.info(f"decimated {len(ensemble)} chains (N={n_sites}, delta={delta})")
    return ensemble


def rsp_scaling_fit(ensemble, block_sizes) -> ScalingFit:
    """Least-squares fit of the averaged entropy against log2 L."""
    ensemble = list(ensemble)
    sizes = sorted(set(int(length) for length in block_sizes))
    if len(sizes) < 3:
        raise FitUnderdetermined(f"need at least 3 distinct block sizes, got {len(sizes)}")
    if not ensemble:
        raise FitUnderdetermined("empty ensemble")

    rows = []
    for length in sizes:
        samples = np.array([position_averaged_pairing_entropy(p, length) for p in ensemble])
        stderr = float(np.std(samples, ddof=1) / math.sqrt(len(samples))) if len(samples) > 1 else 0.0
        rows.append(ScalingRow(length, float(np.mean(samples)), stderr))

    x = np.log2([r.block_len for r in rows])
    y = np.array([r.mean_entropy_bits for r in rows])
    if np.ptp(y) == 0:
        return ScalingFit(0.0, float(y[0]), 1.0, tuple(rows))
    fit = stats.linregress(x, y)
    return ScalingFit(float(fit.slope), float(fit.intercept), float(fit.rvalue**2), tuple(rows))
