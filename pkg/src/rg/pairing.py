"""
Singlet Pairings
================
A perfect matching of sites into singlets. Each singlet with exactly one
end inside a block contributes one bit to the block's entropy, so all
entropies here are bond-cut counts.
"""

import math
from dataclasses import dataclass

import numpy as np

from src.errors import InvalidBlock, InvalidChain, InvariantViolation


@dataclass(frozen=True)
class DecimationStep:
    """One frozen singlet: its sites, the bond's log-strength and the
    log of the effective coupling it created (None at a chain edge or for
    pairings that were not produced by decimation)."""

    left_site: int
    right_site: int
    log_strength: float | None = None
    log_effective: float | None = None

    @property
    def strength(self) -> float | None:
        return None if self.log_strength is None else math.exp(self.log_strength)

    @property
    def effective(self) -> float | None:
        return None if self.log_effective is None else math.exp(self.log_effective)

    def to_dict(self) -> dict:
        return {
            "sites": [self.left_site, self.right_site],
            "log_strength": self.log_strength,
            "log_effective": self.log_effective,
        }


@dataclass(frozen=True)
class SingletPairing:
    n_sites: int
    pairs: tuple
    decimation_log: tuple

    def __post_init__(self):
        pairs = tuple((int(p), int(q)) if p < q else (int(q), int(p)) for p, q in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "decimation_log", tuple(self.decimation_log))

        seen = [site for pair in pairs for site in pair]
        if sorted(seen) != list(range(1, self.n_sites + 1)):
            raise InvariantViolation(f"pairs are not a perfect matching of {self.n_sites} sites")
        if len(self.decimation_log) != self.n_sites // 2:
            raise InvariantViolation(
                f"decimation log has {len(self.decimation_log)} entries, expected {self.n_sites // 2}"
            )

    @property
    def matching(self) -> frozenset:
        return frozenset(self.pairs)

    @property
    def partners(self) -> np.ndarray:
        """partners[i-1] is the site paired with site i."""
        out = np.zeros(self.n_sites, dtype=int)
        for p, q in self.pairs:
            out[p - 1] = q
            out[q - 1] = p
        return out

    def same_matching(self, other: "SingletPairing") -> bool:
        return self.n_sites == other.n_sites and self.matching == other.matching

    def log_document(self) -> dict:
        return {"n_sites": self.n_sites, "steps": [step.to_dict() for step in self.decimation_log]}


# ─── Operations ──────────────────────────────────────────────────────────────

def concentric_pairing(n_sites: int) -> SingletPairing:
    """Nested singlets (N/2-i+1, N/2+i), i = 1..N/2."""
    if n_sites < 2 or n_sites % 2:
        raise InvalidChain(f"concentric pairing needs an even N >= 2, got {n_sites}")
    half = n_sites // 2
    pairs = [(half - i + 1, half + i) for i in range(1, half + 1)]
    return SingletPairing(n_sites, tuple(pairs), tuple(DecimationStep(p, q) for p, q in pairs))


def _check_block(n_sites: int, start: int, length: int):
    if length < 1 or start < 1 or start + length - 1 > n_sites:
        raise InvalidBlock(f"block start={start}, L={length} does not fit in N={n_sites}")


def pairing_entropy(pairing: SingletPairing, start: int, length: int) -> int:
    """Number of singlets with exactly one site in start..start+length-1."""
    _check_block(pairing.n_sites, start, length)
    end = start + length - 1
    return sum(1 for p, q in pairing.pairs if (start <= p <= end) != (start <= q <= end))


def pairing_entropy_profile(pairing: SingletPairing, length: int) -> np.ndarray:
    """Bond-cut entropy at every position 1..N-L+1.

    A block of L sites cuts L - 2k singlets, k being the singlets it fully
    contains; k per position comes from a difference array over the range
    of starts that contain each pair.
    """
    n = pairing.n_sites
    _check_block(n, 1, length)
    positions = n - length + 1

    pairs = np.array(pairing.pairs, dtype=int)
    p, q = pairs[:, 0], pairs[:, 1]
    lo = np.maximum(q - length + 1, 1)
    hi = np.minimum(p, positions)
    inside = lo <= hi

    diff = np.zeros(positions + 1, dtype=int)
    np.add.at(diff, lo[inside] - 1, 1)
    np.add.at(diff, hi[inside], -1)
    contained = np.cumsum(diff)[:positions]
    return length - 2 * contained


def position_averaged_pairing_entropy(pairing: SingletPairing, length: int) -> float:
    return float(np.mean(pairing_entropy_profile(pairing, length)))


def concentric_average_entropy(n_sites: int, block_len: int) -> float:
    """Closed form (1 - L/(2(N-L))) L for the position-averaged concentric entropy."""
    if n_sites < 2 or n_sites % 2:
        raise InvalidChain(f"concentric average needs an even N, got {n_sites}")
    if not 1 <= block_len < n_sites:
        raise InvalidBlock(f"block length {block_len} outside 1..{n_sites - 1}")
    return (1.0 - block_len / (2.0 * (n_sites - block_len))) * block_len
