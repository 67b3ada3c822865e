"""
Quadratic Form
==============
After the Jordan-Wigner mapping the chain Hamiltonian is a quadratic form
in the fermion operators,

    H = sum_ij [ c_i^dag A_ij c_j + (1/2)(c_i^dag B_ij c_j^dag + h.c.) ] + const,

with A real symmetric and B real antisymmetric, both tridiagonal.
"""

from dataclasses import dataclass

import numpy as np

from src.chain.precision import DOUBLE, Precision
from src.chain.spec import ChainSpec


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    a_matrix: np.ndarray
    b_matrix: np.ndarray
    precision: Precision = DOUBLE

    @property
    def n_sites(self) -> int:
        return self.a_matrix.shape[0]

    def m_plus(self) -> np.ndarray:
        """A + B, whose singular value decomposition yields the modes."""
        with self.precision.context():
            return self.a_matrix + self.b_matrix

    def m_minus(self) -> np.ndarray:
        with self.precision.context():
            return self.a_matrix - self.b_matrix


def assemble_quadratic_form(chain: ChainSpec) -> QuadraticForm:
    """A_ii = 2λ_i, A_{i,i+1} = A_{i+1,i} = Jx_i + Jy_i, B_{i,i+1} = -B_{i+1,i} = Jx_i - Jy_i."""
    n = chain.n_sites
    precision = chain.precision
    a = precision.zeros((n, n))
    b = precision.zeros((n, n))

    with precision.context():
        for i in range(n):
            a[i, i] = 2 * chain.field[i]
        for i in range(n - 1):
            hop = chain.jx[i] + chain.jy[i]
            pair = chain.jx[i] - chain.jy[i]
            a[i, i + 1] = hop
            a[i + 1, i] = hop
            b[i, i + 1] = pair
            b[i + 1, i] = -pair

    a.setflags(write=False)
    b.setflags(write=False)
    return QuadraticForm(a, b, precision)
