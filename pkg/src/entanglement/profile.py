"""
Entropy Profiles
================
Scans of block entropy over sizes and positions, plus the diagnostics that
relate the entropy deficit to the correlation matrix:

    S(L) = L - Σ_k h(ν_k)        exact
    S(L) ≈ L - ||T||_F^2         small-ν approximation
    β̂    = Σ_k h(ν_k) / L        deficit per site at the largest end block
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, NamedTuple

import numpy as np

from src.config import BETA_CLASS_TOLERANCE, DECAY_FIT_FLOOR, get_logger
from src.entanglement.spectrum import BlockSpectrum, block_submatrix, mode_deficit
from src.errors import FitUnderdetermined, InvalidBlock
from src.fermions.solver import CorrelationMatrix

log = get_logger("Entanglement")


class EntanglementRegime(str, Enum):
    MAXIMAL = "maximal"
    VOLUME_LAW = "volume-law"
    SUB_VOLUME_LAW = "sub-volume-law"


class BetaEstimate(NamedTuple):
    value: float
    regime: EntanglementRegime
    block_len: int


class FrobeniusDiagnostic(NamedTuple):
    fro_sq: float
    entropy_deficit_prediction: float


@dataclass(frozen=True, eq=False)
class BlockScan:
    """All positions of one block size; ``entropies[i-1]`` is S_L(i)."""

    block_len: int
    entropies: np.ndarray
    end_spectrum: BlockSpectrum
    fro_sq: float

    @property
    def average(self) -> float:
        return float(np.mean(self.entropies))

    @property
    def end_entropy(self) -> float:
        return float(self.entropies[0])

    @property
    def positions(self) -> range:
        return range(1, len(self.entropies) + 1)


@dataclass(frozen=True, eq=False)
class EntropyCurve:
    n_sites: int
    scans: dict = field(default_factory=dict)
    beta: BetaEstimate | None = None
    clipped: tuple = ()  # (start, L, excess) per block whose ν_max was rounded down to 1

    @property
    def block_sizes(self) -> list[int]:
        return list(self.scans)

    def scan(self, length: int) -> BlockScan:
        try:
            return self.scans[length]
        except KeyError:
            raise InvalidBlock(f"block size {length} was not scanned")

    def entropies(self, length: int) -> np.ndarray:
        return self.scan(length).entropies

    def average(self, length: int) -> float:
        return self.scan(length).average

    def end_entropy(self, length: int) -> float:
        return self.scan(length).end_entropy

    def frobenius_sq(self, length: int) -> float:
        return self.scan(length).fro_sq

    def centered_entropy(self, length: int) -> float:
        """S_L of the block centred on the chain; needs N - L even."""
        if (self.n_sites - length) % 2:
            raise InvalidBlock(f"no centred block of size {length} in N={self.n_sites}")
        start = (self.n_sites - length) // 2 + 1
        return float(self.entropies(length)[start - 1])

    def summary_rows(self) -> list[tuple]:
        """(L, S_end, S_avg, fro_sq, L - fro_sq, end-block deficit per site)."""
        rows = []
        for length, scan in self.scans.items():
            rows.append((
                length,
                scan.end_entropy,
                scan.average,
                scan.fro_sq,
                length - scan.fro_sq,
                scan.end_spectrum.deficit / length,
            ))
        return rows

    def position_rows(self) -> list[tuple]:
        """(L, position, S) in ascending L then position."""
        return [
            (length, position, float(value))
            for length, scan in self.scans.items()
            for position, value in zip(scan.positions, scan.entropies)
        ]


# ─── Operations ──────────────────────────────────────────────────────────────

def entropy_profile(g, block_sizes=None) -> EntropyCurve:
    """
    S_L(i) for every contiguous block of sites i..i+L-1, i = 1..N-L+1.

    ``block_sizes`` defaults to 1..N-1. β̂ is taken at the largest scanned
    end block with L <= N/2.
    """
    matrix = g.g if isinstance(g, CorrelationMatrix) else np.asarray(g, dtype=float)
    n = matrix.shape[0]
    sizes = range(1, n) if block_sizes is None else sorted(set(int(s) for s in block_sizes))

    scans = {}
    clipped = []
    for length in sizes:
        if not 1 <= length <= n:
            raise InvalidBlock(f"block size {length} outside 1..{n}")
        spectra = [BlockSpectrum.of_block(matrix, start, length) for start in range(1, n - length + 2)]
        clipped.extend((s.block_start, length, s.clipped) for s in spectra if s.clipped > 0)
        end_t = block_submatrix(matrix, 1, length)
        scans[length] = BlockScan(
            block_len=length,
            entropies=np.array([s.entropy_bits for s in spectra]),
            end_spectrum=spectra[0],
            fro_sq=frobenius_diagnostic(end_t).fro_sq,
        )

    beta = None
    if scans:
        spectra = {length: scan.end_spectrum.nus for length, scan in scans.items()}
        half = {length: nus for length, nus in spectra.items() if length <= n // 2}
        beta = beta_estimate(half or spectra)
    log.debug(f"scanned {len(scans)} block sizes on N={n}")
    return EntropyCurve(n_sites=n, scans=scans, beta=beta, clipped=tuple(clipped))


def end_block_entropies(g, block_sizes) -> dict[int, float]:
    """S_L(1) only; cheaper than a full scan for long chains."""
    return {int(length): BlockSpectrum.of_block(g, 1, int(length)).entropy_bits for length in block_sizes}


def frobenius_diagnostic(t) -> FrobeniusDiagnostic:
    t = np.asarray(t, dtype=float)
    fro_sq = float(np.sum(t * t))
    return FrobeniusDiagnostic(fro_sq, t.shape[0] - fro_sq)


def beta_estimate(spectra: Mapping[int, np.ndarray]) -> BetaEstimate:
    """β̂ = (1/L) Σ_k h(ν_k) at the largest L in ``spectra``."""
    if not spectra:
        raise FitUnderdetermined("beta_estimate needs at least one block spectrum")
    length = max(spectra)
    value = float(np.sum(mode_deficit(spectra[length]))) / length
    if value <= BETA_CLASS_TOLERANCE:
        regime = EntanglementRegime.MAXIMAL
    elif value >= 1.0 - BETA_CLASS_TOLERANCE:
        regime = EntanglementRegime.SUB_VOLUME_LAW
    else:
        regime = EntanglementRegime.VOLUME_LAW
    return BetaEstimate(value, regime, length)


def decay_exponent_fit(t, origin: str = "cut") -> float:
    """
    Exponent p of |T_ij| ~ (ij)^(-p), least squares in log-log.

    ``origin="cut"`` counts i, j from the block's last site, the one facing
    the rest of the chain for a left end block; ``origin="start"`` counts
    them from its first site. Entries below a relative floor are treated as
    zeros. Returns +inf when T vanishes.
    """
    t = np.abs(np.asarray(t, dtype=float))
    length = t.shape[0]
    if length < 4:
        raise InvalidBlock(f"decay fit needs L >= 4, got {length}")
    if origin not in ("start", "cut"):
        raise ValueError(f"origin must be 'start' or 'cut', got {origin!r}")

    peak = t.max()
    if peak == 0:
        return math.inf

    index = np.arange(1, length + 1)
    if origin == "cut":
        index = index[::-1]
    products = np.outer(index, index)
    mask = t > DECAY_FIT_FLOOR * peak
    x = np.log(products[mask])
    if np.unique(x).size < 2:
        raise FitUnderdetermined("decay fit needs entries at two distinct index products")
    slope, _ = np.polyfit(x, np.log(t[mask]), 1)
    return float(-slope)
