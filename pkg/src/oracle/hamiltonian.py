"""
Dense Hamiltonians
==================
Brute-force 2^N x 2^N spin Hamiltonians for small chains.

Basis: site 1 is the most significant bit of the basis index and
σz|0> = +|0>. On bond (k, k+1) the operator Jx σxσx + Jy σyσy flips both
spins with amplitude Jx + Jy when they differ and Jx - Jy when they agree,
so every matrix here is real symmetric.
"""

from enum import Enum

import numpy as np

from src.chain.spec import ChainSpec
from src.config import ORACLE_MAX_SITES
from src.errors import TooLarge


class Convention(str, Enum):
    # H = -1/2 Σ (Jx σxσx + Jy σyσy) - Σ λ σz
    HALF = "half"
    # H = Σ (Jx σxσx + Jy σyσy) - Σ λ σz, the free-fermion pipeline's own form
    UNIT = "unit"


_BOND_SCALE = {Convention.HALF: -0.5, Convention.UNIT: 1.0}


def site_bits(n_sites: int, site: int) -> np.ndarray:
    """Occupation (0/1) of ``site`` (1-based) in every basis state."""
    index = np.arange(2**n_sites)
    return (index >> (n_sites - site)) & 1


def build_dense_hamiltonian(chain: ChainSpec, convention: Convention | str = Convention.UNIT) -> np.ndarray:
    convention = Convention(convention)
    n = chain.n_sites
    if n > ORACLE_MAX_SITES:
        raise TooLarge(f"dense Hamiltonian for N={n} exceeds the {ORACLE_MAX_SITES}-site cap")

    jx, jy, field = chain.as_double()
    dim = 2**n
    index = np.arange(dim)
    h = np.zeros((dim, dim))

    bits = [site_bits(n, site) for site in range(1, n + 1)]
    h[index, index] = -sum(field[k] * (1 - 2 * bits[k]) for k in range(n))

    scale = _BOND_SCALE[convention]
    for k in range(n - 1):
        mask = (1 << (n - 1 - k)) | (1 << (n - 2 - k))
        amplitude = np.where(bits[k] != bits[k + 1], jx[k] + jy[k], jx[k] - jy[k]) * scale
        h[index ^ mask, index] += amplitude
    return h


def four_spin_problem() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Chain {λ, 1, λ} split as H = H0 + λV: H0 is the central bond, V the two
    edge bonds (``unit`` convention). The basis columns are |a>ψ-|b> with
    ψ- = (|01> - |10>)/√2 on sites 2, 3, ordered ab = 00, 01, 10, 11.
    """
    h0 = build_dense_hamiltonian(ChainSpec.xx([0.0, 1.0, 0.0]))
    v = build_dense_hamiltonian(ChainSpec.xx([1.0, 0.0, 1.0]))

    singlet = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0)
    up, down = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    columns = [np.kron(a, np.kron(singlet, b)) for a in (up, down) for b in (up, down)]
    return h0, v, np.column_stack(columns)
