"""
Chain Specification
===================
``ChainSpec`` is the full microscopic description of one open XY chain:
bond couplings Jx, Jy (N-1 each) and transverse fields λ (N). Bond k
(0-based) joins sites k+1 and k+2.

Serializes to a JSON document whose numbers are decimal strings, so the
couplings survive a round-trip exactly at the chain's precision.
"""

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from src.chain.precision import DOUBLE, Precision, to_double
from src.errors import InvalidChain

_DOCUMENT_KEYS = {"n_sites", "jx", "jy", "field", "precision_bits", "provenance", "underflow"}


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """Couplings and fields of an open chain, stored read-only at ``precision``."""

    n_sites: int
    jx: np.ndarray
    jy: np.ndarray
    field: np.ndarray
    precision: Precision = DOUBLE
    provenance: dict = dataclasses.field(default_factory=dict)
    underflow: bool = False

    def __post_init__(self):
        if not isinstance(self.n_sites, (int, np.integer)) or self.n_sites < 1:
            raise InvalidChain(f"n_sites must be a positive integer, got {self.n_sites!r}")
        object.__setattr__(self, "n_sites", int(self.n_sites))

        for name, expected in (("jx", self.n_sites - 1), ("jy", self.n_sites - 1), ("field", self.n_sites)):
            values = getattr(self, name)
            try:
                arr = self.precision.array(values)
            except (TypeError, ValueError) as e:
                raise InvalidChain(f"{name}: {e}") from e
            if arr.ndim != 1 or arr.shape[0] != expected:
                raise InvalidChain(f"{name} must hold {expected} values, got shape {arr.shape}")
            if not all(self.precision.is_finite(v) for v in arr):
                raise InvalidChain(f"{name} contains non-finite entries")
            object.__setattr__(self, name, arr)

    # ── Constructors ──────────────────────────────────────────────────────

    @classmethod
    def xx(cls, couplings, field=None, precision: Precision = DOUBLE, **kwargs) -> "ChainSpec":
        """XX chain (Jx = Jy) from one list of bond couplings."""
        couplings = list(couplings)
        n_sites = len(couplings) + 1
        if field is None:
            field = [0] * n_sites
        return cls(n_sites, couplings, couplings, field, precision=precision, **kwargs)

    # ── Queries ───────────────────────────────────────────────────────────

    @property
    def n_bonds(self) -> int:
        return self.n_sites - 1

    @property
    def is_xx(self) -> bool:
        return bool(np.all(self.jx == self.jy))

    @property
    def has_zero_field(self) -> bool:
        return bool(np.all(self.field == 0))

    def as_double(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(jx, jy, field) as float64 arrays."""
        return to_double(self.jx), to_double(self.jy), to_double(self.field)

    # ── Derived chains ────────────────────────────────────────────────────

    def with_precision(self, precision: Precision) -> "ChainSpec":
        """Same chain re-expressed at another precision.

        Widening is exact; narrowing to double rounds each value once.
        """
        if precision == self.precision:
            return self
        jx, jy, field = (self.jx, self.jy, self.field)
        if not self.precision.is_double and precision.is_double:
            jx, jy, field = self.as_double()
        return dataclasses.replace(self, jx=jx, jy=jy, field=field, precision=precision)

    def reversed(self) -> "ChainSpec":
        """Mirror image: site i becomes site N+1-i."""
        return dataclasses.replace(self, jx=self.jx[::-1], jy=self.jy[::-1], field=self.field[::-1])

    def scaled_couplings(self, factor) -> "ChainSpec":
        """Multiply every bond coupling by ``factor``; fields are untouched."""
        scale = self.precision.number(factor)
        with self.precision.context():
            jx = [scale * v for v in self.jx]
            jy = [scale * v for v in self.jy]
        return dataclasses.replace(self, jx=jx, jy=jy)

    # ── Equality ──────────────────────────────────────────────────────────

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainSpec):
            return NotImplemented
        return (
            self.n_sites == other.n_sites
            and self.precision == other.precision
            and self.underflow == other.underflow
            and self.provenance == other.provenance
            and np.array_equal(self.jx, other.jx)
            and np.array_equal(self.jy, other.jy)
            and np.array_equal(self.field, other.field)
        )

    __hash__ = None

    # ── Serialization ─────────────────────────────────────────────────────

    def to_document(self) -> dict:
        fmt = self.precision.format
        return {
            "n_sites": self.n_sites,
            "jx": [fmt(v) for v in self.jx],
            "jy": [fmt(v) for v in self.jy],
            "field": [fmt(v) for v in self.field],
            "precision_bits": self.precision.bits,
            "provenance": self.provenance,
            "underflow": self.underflow,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2)

    @classmethod
    def from_document(cls, document: dict) -> "ChainSpec":
        unknown = set(document) - _DOCUMENT_KEYS
        if unknown:
            raise InvalidChain(f"unknown chain keys: {sorted(unknown)}")
        try:
            precision = Precision(document.get("precision_bits", DOUBLE.bits))
            return cls(
                document["n_sites"],
                [precision.number(v) for v in document["jx"]],
                [precision.number(v) for v in document["jy"]],
                [precision.number(v) for v in document["field"]],
                precision=precision,
                provenance=dict(document.get("provenance", {})),
                underflow=bool(document.get("underflow", False)),
            )
        except KeyError as e:
            raise InvalidChain(f"chain document is missing {e}") from e

    @classmethod
    def from_json(cls, text: str) -> "ChainSpec":
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidChain(f"line {e.lineno}: {e.msg}") from e
        return cls.from_document(document)
