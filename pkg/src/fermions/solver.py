"""
Free-Fermion Solver
===================
Bogoliubov modes of the quadratic form and the ground-state correlation
matrix G.

The modes come from the SVD of M = A + B = U diag(Λ) Vᵀ: Φ_k is column k
of U, Ψ_k is row k of Vᵀ. Then (A+B)Ψ_k = Λ_k Φ_k and (A−B)Φ_k = Λ_k Ψ_k
hold with Λ_k >= 0, without ever squaring M.
"""

from dataclasses import dataclass, field

import numpy as np

from src.chain.precision import DOUBLE, Precision, to_double
from src.chain.quadratic import QuadraticForm
from src.config import ORTHONORMALITY_TOLERANCE, SVD_RESIDUAL_TOLERANCE, get_logger
from src.errors import DegenerateGroundState, NumericalFailure
from src.fermions.backends import get_backend

log = get_logger("Solver")


@dataclass(frozen=True, eq=False)
class ModeSet:
    """
    Bogoliubov solution. ``lambdas`` sorted descending; row k of ``phi`` is
    Φ_k and row k of ``psi`` is Ψ_k. Arrays are in the solving precision
    (object dtype for mpmath); use ``as_double`` for float64 copies.
    """

    lambdas: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    zero_mode_tolerance: float
    precision: Precision = DOUBLE

    @property
    def n_modes(self) -> int:
        return len(self.lambdas)

    def as_double(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return to_double(self.lambdas), to_double(self.phi), to_double(self.psi)

    def residuals(self, qf: QuadraticForm) -> dict:
        """Relative residuals of the pair equations and of the squared
        eigenproblem (A+B)(A−B)Φ_k = Λ_k² Φ_k, in float64."""
        lam, phi, psi = self.as_double()
        a, b = to_double(qf.a_matrix), to_double(qf.b_matrix)
        scale = max(np.linalg.norm(a + b), 1.0)
        squared = (a + b) @ (a - b)
        return {
            "psi_from_phi": np.linalg.norm((a - b) @ phi.T - psi.T * lam) / scale,
            "phi_from_psi": np.linalg.norm((a + b) @ psi.T - phi.T * lam) / scale,
            "squared": np.linalg.norm(squared @ phi.T - phi.T * lam**2) / scale**2,
            "reconstruction": np.linalg.norm((a + b) - phi.T @ np.diag(lam) @ psi) / scale,
        }


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """G_{mn} = <(c_n^dag - c_n)(c_m^dag + c_m)> in the ground state, float64."""

    g: np.ndarray
    source: dict = field(default_factory=dict)

    @property
    def n_sites(self) -> int:
        return self.g.shape[0]

    def squared_row_sums(self) -> np.ndarray:
        return np.sum(self.g**2, axis=1)

    def squared_column_sums(self) -> np.ndarray:
        return np.sum(self.g**2, axis=0)


# ─── Operations ──────────────────────────────────────────────────────────────

def solve_modes(qf: QuadraticForm, zero_mode_tolerance: float | None = None) -> ModeSet:
    precision = qf.precision
    tolerance = precision.zero_mode_tolerance if zero_mode_tolerance is None else zero_mode_tolerance
    n = qf.n_sites

    m = qf.m_plus()
    if not all(precision.is_finite(v) for v in np.ravel(m)):
        raise NumericalFailure("quadratic form has non-finite entries")

    backend = get_backend(precision)
    u, s, vt = backend.svd(m)

    if n:
        lam_max, lam_min = s[0], s[-1]
        if lam_max == 0 or lam_min < tolerance * lam_max:
            ratio = float(lam_min / lam_max) if lam_max != 0 else 0.0
            raise DegenerateGroundState(
                f"Λ_min/Λ_max = {ratio:.3e} below zero-mode tolerance {tolerance:.1e} "
                f"({backend.name}); the vacuum is ambiguous"
            )

    modes = ModeSet(
        lambdas=s,
        phi=u.T,
        psi=vt,
        zero_mode_tolerance=tolerance,
        precision=precision,
    )
    _check_modes(modes, qf)
    log.debug(f"{n} modes via {backend.name}, Λ in [{float(s[-1]) if n else 0:.3e}, {float(s[0]) if n else 0:.3e}]")
    return modes


def _check_modes(modes: ModeSet, qf: QuadraticForm):
    _, phi, psi = modes.as_double()
    eye = np.eye(modes.n_modes)
    for name, rows in (("Φ", phi), ("Ψ", psi)):
        error = np.max(np.abs(rows @ rows.T - eye), initial=0.0)
        if error > ORTHONORMALITY_TOLERANCE:
            raise NumericalFailure(f"{name} rows not orthonormal (max error {error:.2e})")
    residual = modes.residuals(qf)["reconstruction"]
    if residual > SVD_RESIDUAL_TOLERANCE:
        raise NumericalFailure(f"SVD reconstruction residual {residual:.2e} exceeds {SVD_RESIDUAL_TOLERANCE:.0e}")


def ground_energy(modes: ModeSet) -> float:
    """Vacuum energy -1/2 Σ Λ_k of H = Σ Λ_k (η_k^dag η_k - 1/2)."""
    if modes.n_modes == 0:
        return 0.0
    with modes.precision.context():
        total = sum(modes.lambdas)
    return -0.5 * float(total)


def correlation_matrix(modes: ModeSet, source: dict | None = None) -> CorrelationMatrix:
    """G = -Ψᵀ Φ, accumulated in the solving precision and returned as float64."""
    backend = get_backend(modes.precision)
    with modes.precision.context():
        g = backend.matmul(modes.psi.T, modes.phi)
        g = -g
    g = to_double(g)
    g.setflags(write=False)
    return CorrelationMatrix(g=g, source=dict(source or {}))
