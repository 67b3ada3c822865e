"""
Degenerate Perturbation Theory
==============================
Second-order effective matrix on a degenerate eigenspace of H0 when the
first-order projection of V vanishes:

    M_mm' = Σ_{k outside} <m|V|k><k|V|m'> / (E0 - E_k)

so the levels split as E0 + λ² eig(M).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from src.config import ORTHONORMALITY_TOLERANCE, get_logger
from src.errors import FirstOrderNotZero, InvalidSubspace

log = get_logger("Oracle")

_FIRST_ORDER_TOLERANCE = 1e-10
_EIGENSPACE_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class PTResult:
    effective_matrix: np.ndarray
    second_order_shifts: np.ndarray
    unperturbed_energy: float

    @property
    def subspace_dim(self) -> int:
        return self.effective_matrix.shape[0]

    def corrected_energies(self, coupling: float) -> np.ndarray:
        """E0 + λ² E2 for each level, ascending."""
        return self.unperturbed_energy + coupling**2 * self.second_order_shifts


def _basis_matrix(basis) -> np.ndarray:
    if isinstance(basis, np.ndarray) and basis.ndim == 2:
        b = basis.astype(float)
    else:
        b = np.column_stack([np.asarray(v, dtype=float) for v in basis])
    gram = b.T @ b
    error = np.max(np.abs(gram - np.eye(b.shape[1])))
    if error > ORTHONORMALITY_TOLERANCE:
        raise InvalidSubspace(f"basis is not orthonormal (max Gram error {error:.2e})")
    return b


def effective_hamiltonian_projection(h: np.ndarray, basis) -> np.ndarray:
    """P H P restricted to the subspace, as a d x d matrix."""
    b = _basis_matrix(basis)
    return b.T @ np.asarray(h, dtype=float) @ b


def degenerate_pt2(h0: np.ndarray, v: np.ndarray, degenerate_basis) -> PTResult:
    h0 = np.asarray(h0, dtype=float)
    v = np.asarray(v, dtype=float)
    b = _basis_matrix(degenerate_basis)

    scale = max(1.0, float(np.max(np.abs(h0))))
    energies = np.diag(b.T @ h0 @ b)
    e0 = float(np.mean(energies))
    if np.max(np.abs(h0 @ b - e0 * b)) > _EIGENSPACE_TOLERANCE * scale:
        raise InvalidSubspace("basis vectors are not eigenvectors of H0 with one common eigenvalue")

    first = b.T @ v @ b
    if np.max(np.abs(first), initial=0.0) > _FIRST_ORDER_TOLERANCE * max(1.0, float(np.max(np.abs(v)))):
        raise FirstOrderNotZero("projected perturbation does not vanish; first-order degenerate PT applies")

    levels, states = scipy.linalg.eigh(h0)
    outside = np.abs(levels - e0) > _EIGENSPACE_TOLERANCE * scale
    couplings = states[:, outside].T @ (v @ b)
    denominators = e0 - levels[outside]
    m = couplings.T @ (couplings / denominators[:, None])
    m = (m + m.T) / 2.0

    shifts = scipy.linalg.eigvalsh(m)
    log.debug(f"second-order shifts {np.round(shifts, 12).tolist()} on a {b.shape[1]}-dim subspace")
    return PTResult(effective_matrix=m, second_order_shifts=shifts, unperturbed_energy=e0)
