"""
Block Spectra
=============
ν spectrum of a contiguous block and its entropy in bits.

For a block of L sites the reduced state is a product of L independent
fermionic modes; mode k is mixed with probabilities (1 ± ν_k)/2 where
ν_k are the singular values of the block submatrix T of G.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import xlog1py, xlogy

from src.config import NU_CLIP_TOLERANCE, get_logger
from src.errors import InvalidBlock, PhysicalityViolation
from src.fermions.solver import CorrelationMatrix

log = get_logger("Entanglement")

_LN2 = math.log(2.0)


def _matrix(g) -> np.ndarray:
    return g.g if isinstance(g, CorrelationMatrix) else np.asarray(g, dtype=float)


def block_submatrix(g, start: int, length: int) -> np.ndarray:
    """T = G[start..start+L-1, start..start+L-1] with 1-based ``start``."""
    matrix = _matrix(g)
    n = matrix.shape[0]
    if length < 1 or start < 1 or start + length - 1 > n:
        raise InvalidBlock(f"block start={start}, L={length} does not fit in N={n}")
    lo = start - 1
    return matrix[lo:lo + length, lo:lo + length]


def complement_submatrix(g, start: int, length: int) -> np.ndarray:
    """G restricted to every site outside the block."""
    matrix = _matrix(g)
    n = matrix.shape[0]
    block_submatrix(matrix, start, length)
    outside = np.r_[0:start - 1, start - 1 + length:n]
    return matrix[np.ix_(outside, outside)]


def _clip(nus: np.ndarray) -> tuple[np.ndarray, float]:
    """Clip singular values into [0, 1]; returns them with the excess removed above 1."""
    if nus.size == 0:
        return np.zeros(0), 0.0
    excess = float(nus[0]) - 1.0
    if excess > NU_CLIP_TOLERANCE:
        raise PhysicalityViolation(f"block singular value {nus[0]:.12f} exceeds 1 by {excess:.2e}")
    if excess > 0:
        log.debug(f"clipping ν_max = 1 + {excess:.1e}")
    return np.clip(nus, 0.0, 1.0), max(excess, 0.0)


def _singular_values(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.size == 0:
        return np.zeros(0)
    return scipy.linalg.svd(t, compute_uv=False)


def nu_spectrum(t: np.ndarray) -> np.ndarray:
    """Singular values of T clipped into [0, 1], descending."""
    return _clip(_singular_values(t))[0]


def binary_entropy(p) -> np.ndarray:
    """H(p) = -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    return -(xlogy(p, p) + xlogy(1.0 - p, 1.0 - p)) / _LN2


def mode_deficit(nu) -> np.ndarray:
    """h(ν) = 1 - H((1+ν)/2), written with log1p so small ν stays accurate."""
    nu = np.asarray(nu, dtype=float)
    return (xlog1py(1.0 + nu, nu) + xlog1py(1.0 - nu, -nu)) / (2.0 * _LN2)


def block_entropy(nus) -> float:
    """Σ_k H((1+ν_k)/2) in bits."""
    nus = np.asarray(nus, dtype=float)
    return float(np.sum(binary_entropy((1.0 + nus) / 2.0)))


@dataclass(frozen=True, eq=False)
class BlockSpectrum:
    block_start: int
    block_len: int
    nus: np.ndarray
    entropy_bits: float
    clipped: float = 0.0

    @classmethod
    def of_block(cls, g, start: int, length: int) -> "BlockSpectrum":
        nus, excess = _clip(_singular_values(block_submatrix(g, start, length)))
        return cls(start, length, nus, block_entropy(nus), excess)

    @property
    def deficit(self) -> float:
        """Σ_k h(ν_k) = L - S."""
        return float(np.sum(mode_deficit(self.nus)))

    @property
    def entanglement_energies(self) -> np.ndarray:
        """ε_k = 2 artanh(ν_k); +inf for pure modes."""
        with np.errstate(divide="ignore"):
            return 2.0 * np.arctanh(self.nus)


def complement_entropy(g, start: int, length: int) -> float:
    """Entropy of everything outside the block, from its own submatrix of G."""
    rest = complement_submatrix(g, start, length)
    return block_entropy(nu_spectrum(rest))
