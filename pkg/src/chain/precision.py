"""
Arithmetic Precision
====================
A chain is evaluated either in machine double (numpy/scipy) or in mpmath
software floats with a configurable mantissa width. ``Precision`` is the
single switch every downstream module consults.
"""

import contextlib
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from src.config import DOUBLE_BITS, ZERO_MODE_GUARD_BITS, ZERO_MODE_TOLERANCE
from src.errors import InvalidChain

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class Precision:
    """Mantissa width of the arithmetic; 53 bits means IEEE double."""

    bits: int = DOUBLE_BITS

    def __post_init__(self):
        if not isinstance(self.bits, (int, np.integer)) or self.bits < DOUBLE_BITS:
            raise InvalidChain(f"precision_bits must be an integer >= {DOUBLE_BITS}, got {self.bits!r}")
        object.__setattr__(self, "bits", int(self.bits))

    @property
    def is_double(self) -> bool:
        return self.bits == DOUBLE_BITS

    @property
    def decimal_digits(self) -> int:
        """Significant digits needed for an exact decimal round-trip."""
        if self.is_double:
            return 17
        return int(math.ceil(self.bits * math.log10(2))) + 2

    @property
    def zero_mode_tolerance(self) -> float:
        if self.is_double:
            return ZERO_MODE_TOLERANCE
        return 2.0 ** (ZERO_MODE_GUARD_BITS - self.bits)

    def context(self):
        """Context manager that sets mpmath's working precision (no-op for double)."""
        if self.is_double:
            return contextlib.nullcontext()
        return mpmath.workprec(self.bits)

    # ── Scalars ───────────────────────────────────────────────────────────

    def number(self, value):
        """Convert a float, int, decimal string or mpf into this precision."""
        if self.is_double:
            return float(value)
        with self.context():
            return mpmath.mpf(value)

    def log(self, value):
        if self.is_double:
            return math.log(float(value))
        with self.context():
            return mpmath.log(mpmath.mpf(value))

    def exp_checked(self, exponent) -> tuple:
        """exp(exponent) plus a flag telling whether the result underflowed.

        Underflowed values (subnormal or zero in double) come back as 0.0.
        mpmath's exponent range never underflows in practice.
        """
        if self.is_double:
            value = math.exp(float(exponent))
            if value < _TINY:
                return 0.0, True
            return value, False
        with self.context():
            return mpmath.exp(exponent), False

    def format(self, value) -> str:
        if self.is_double:
            return repr(float(value))
        with self.context():
            return mpmath.nstr(mpmath.mpf(value), self.decimal_digits, strip_zeros=False)

    # ── Arrays ────────────────────────────────────────────────────────────

    def array(self, values) -> np.ndarray:
        """Read-only 1-D or 2-D array in this precision (object dtype for mpmath)."""
        if self.is_double:
            arr = np.array(values, dtype=float)
        else:
            with self.context():
                raw = np.asarray(values, dtype=object)
                arr = np.empty(raw.shape, dtype=object)
                for index, item in np.ndenumerate(raw):
                    arr[index] = mpmath.mpf(item)
        arr.setflags(write=False)
        return arr

    def zeros(self, shape) -> np.ndarray:
        if self.is_double:
            return np.zeros(shape, dtype=float)
        with self.context():
            return np.full(shape, mpmath.mpf(0), dtype=object)

    def is_finite(self, value) -> bool:
        if self.is_double:
            return bool(np.isfinite(value))
        return not (mpmath.isinf(value) or mpmath.isnan(value))


DOUBLE = Precision(DOUBLE_BITS)


def to_double(values) -> np.ndarray:
    """Float64 copy of an array in any precision."""
    arr = np.asarray(values)
    if arr.dtype == object:
        return np.vectorize(float, otypes=[float])(arr) if arr.size else np.zeros(arr.shape)
    return np.array(arr, dtype=float)
