"""
Dense States
============
Ground states by full diagonalization, partial traces and Von Neumann
entropies for the small-chain oracle.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import xlogy

from src.config import DEGENERACY_GAP_RATIO, DENSITY_CLIP_TOLERANCE, ORACLE_MAX_SITES
from src.errors import InvalidBlock, PhysicalityViolation, TooLarge
from src.oracle.hamiltonian import site_bits
from src.rg.pairing import SingletPairing

_NORM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class DenseState:
    n_sites: int | None
    amplitudes: np.ndarray
    energy: float
    degenerate: bool = False
    gap: float = math.inf

    def __post_init__(self):
        norm = float(np.dot(self.amplitudes, self.amplitudes))
        if abs(norm - 1.0) > _NORM_TOLERANCE:
            raise PhysicalityViolation(f"state norm² = {norm!r}, expected 1")


def _n_sites_for(dim: int) -> int | None:
    return dim.bit_length() - 1 if dim & (dim - 1) == 0 else None


def ground_state(h: np.ndarray) -> DenseState:
    """Lowest eigenvector (largest component made positive) and its energy.

    ``degenerate`` is set when the gap to the next level is below
    DEGENERACY_GAP_RATIO times the spectral range.
    """
    h = np.asarray(h, dtype=float)
    dim = h.shape[0]
    if dim == 1:
        return DenseState(0, np.ones(1), float(h[0, 0]))

    values, vectors = scipy.linalg.eigh(h, subset_by_index=[0, 1])
    top = scipy.linalg.eigh(h, eigvals_only=True, subset_by_index=[dim - 1, dim - 1])[0]
    spread = float(top - values[0])
    gap = float(values[1] - values[0])
    degenerate = gap <= DEGENERACY_GAP_RATIO * spread if spread > 0 else True

    psi = vectors[:, 0]
    if psi[np.argmax(np.abs(psi))] < 0:
        psi = -psi
    psi = psi / np.linalg.norm(psi)
    return DenseState(_n_sites_for(dim), psi, float(values[0]), degenerate, gap)


def _normalize_block(n_sites: int, block) -> tuple[int, ...]:
    sites = tuple(sorted(int(s) for s in block))
    if not sites:
        raise InvalidBlock("block is empty")
    if len(set(sites)) != len(sites):
        raise InvalidBlock(f"block {sites} repeats a site")
    if sites[0] < 1 or sites[-1] > n_sites:
        raise InvalidBlock(f"block {sites} outside sites 1..{n_sites}")
    if len(sites) == n_sites:
        raise InvalidBlock("block must be a proper subset of the chain")
    return sites


def reduced_density(state: DenseState, block) -> np.ndarray:
    """Partial trace over every site outside ``block`` (sites in ascending order)."""
    n = state.n_sites
    if not n:
        raise InvalidBlock("state does not live on a qubit chain")
    keep = [s - 1 for s in _normalize_block(n, block)]
    rest = [k for k in range(n) if k not in keep]

    psi = state.amplitudes.reshape((2,) * n)
    m = np.transpose(psi, keep + rest).reshape(2 ** len(keep), -1)
    rho = m @ m.T
    return (rho + rho.T) / 2.0


def complement(n_sites: int, block) -> tuple[int, ...]:
    inside = set(_normalize_block(n_sites, block))
    return tuple(s for s in range(1, n_sites + 1) if s not in inside)


def entropy_vn(rho: np.ndarray) -> float:
    """-Σ p log2 p over the eigenvalues of ``rho``."""
    weights = scipy.linalg.eigvalsh(np.asarray(rho, dtype=float))
    if weights.min() < -DENSITY_CLIP_TOLERANCE:
        raise PhysicalityViolation(f"density matrix eigenvalue {weights.min():.3e} is negative")
    weights = np.clip(weights, 0.0, None)
    return float(-np.sum(xlogy(weights, weights)) / math.log(2.0))


def contiguous_block_entropies(state: DenseState) -> dict[tuple[int, int], float]:
    """{(start, L): S} for every contiguous block with 1 <= L <= N-1."""
    n = state.n_sites
    return {
        (start, length): entropy_vn(reduced_density(state, range(start, start + length)))
        for length in range(1, n)
        for start in range(1, n - length + 2)
    }


def singlet_product_state(pairing: SingletPairing) -> DenseState:
    """Product of (|01> - |10>)/√2 over the pairs, lower site first."""
    n = pairing.n_sites
    if n > ORACLE_MAX_SITES:
        raise TooLarge(f"dense state for N={n} exceeds the {ORACLE_MAX_SITES}-site cap")
    amplitudes = np.ones(2**n)
    for p, q in pairing.pairs:
        bp, bq = site_bits(n, p), site_bits(n, q)
        amplitudes *= np.where(bp == bq, 0.0, np.where(bp == 0, 1.0, -1.0) / math.sqrt(2.0))
    return DenseState(n, amplitudes, energy=math.nan)
