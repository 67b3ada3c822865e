"""
Linear-Algebra Backends
=======================
Abstract SVD interface with two implementations: LAPACK in machine double
(scipy) and mpmath at a configurable mantissa width. The solver only talks
to ``LinalgBackend``.
"""

from abc import ABC, abstractmethod

import mpmath
import numpy as np
import scipy.linalg

from src.chain.precision import Precision


class LinalgBackend(ABC):
    """Abstract dense SVD provider."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Backend name for logging."""
        ...

    @property
    @abstractmethod
    def precision(self) -> Precision:
        ...

    @abstractmethod
    def svd(self, matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Full SVD of a square real matrix.

        Returns:
            (U, S, Vt) with matrix = U @ diag(S) @ Vt and S sorted descending,
            all in the backend's number type.
        """
        ...

    @abstractmethod
    def matmul(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        ...


class DoubleBackend(LinalgBackend):
    """scipy.linalg (LAPACK gesdd) in float64."""

    def __init__(self, precision: Precision | None = None):
        self._precision = precision or Precision()

    @property
    def name(self) -> str:
        return "double"

    @property
    def precision(self) -> Precision:
        return self._precision

    def svd(self, matrix):
        u, s, vt = scipy.linalg.svd(np.asarray(matrix, dtype=float))
        return u, s, vt

    def matmul(self, left, right):
        return np.asarray(left, dtype=float) @ np.asarray(right, dtype=float)


class ExtendedBackend(LinalgBackend):
    """mpmath's real SVD at ``precision.bits`` mantissa bits."""

    def __init__(self, precision: Precision):
        self._precision = precision

    @property
    def name(self) -> str:
        return f"mpmath-{self._precision.bits}"

    @property
    def precision(self) -> Precision:
        return self._precision

    def svd(self, matrix):
        n = matrix.shape[0]
        with self._precision.context():
            m = mpmath.matrix(np.asarray(matrix, dtype=object).tolist())
            u, s, v = mpmath.svd_r(m, full_matrices=True, compute_uv=True)
            values = [s[k] for k in range(n)]
            order = sorted(range(n), key=lambda k: values[k], reverse=True)
            u_arr = np.empty((n, n), dtype=object)
            vt_arr = np.empty((n, n), dtype=object)
            for col, k in enumerate(order):
                for row in range(n):
                    u_arr[row, col] = u[row, k]
                    vt_arr[col, row] = v[k, row]
            s_arr = np.array([values[k] for k in order], dtype=object)
        return u_arr, s_arr, vt_arr

    def matmul(self, left, right):
        with self._precision.context():
            return np.asarray(left, dtype=object) @ np.asarray(right, dtype=object)


def get_backend(precision: Precision) -> LinalgBackend:
    if precision.is_double:
        return DoubleBackend(precision)
    return ExtendedBackend(precision)
