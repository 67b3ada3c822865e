"""
Coupling Profiles
=================
Bond-strength families for concentric chains, indexed by the distance n
from the central bond (J_0 is the central bond), plus the strong-disorder
sampler used for random-singlet ensembles.

All profiles are evaluated in log space at the chain's precision, so only
the final exponentiation can underflow.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.chain.precision import DOUBLE, Precision
from src.chain.spec import ChainSpec
from src.config import get_logger
from src.errors import InvalidChain, InvalidProfile

log = get_logger("Chain")

_UNIFORM_FLOOR = np.finfo(float).tiny


class ProfileKind(str, Enum):
    GAUSSIAN = "gaussian"
    EXPONENTIAL = "exponential"
    POWER_OF_EPSILON = "power-of-epsilon"
    RG_SCHEME = "rg-scheme"
    EXPLICIT = "explicit"
    RANDOM_STRONG_DISORDER = "random-strong-disorder"


_PROFILE_KEYS = {"kind", "base", "epsilon", "j0", "alpha_power", "alphas", "values", "delta", "seed"}


@dataclass(frozen=True)
class CouplingProfile:
    """
    Parameters of one coupling family.

    gaussian                J_n = base^(-n^2)             (base defaults to e)
    exponential             J_n = base^(-n)
    power-of-epsilon        J_n = epsilon^alpha(n), alpha(n) = n^alpha_power or alphas[n]
    rg-scheme               J_0 = j0, J_i = epsilon (epsilon^2/2)^(i-1) j0
    explicit                J_n = values[n]
    random-strong-disorder  J_n = u_n^delta, u_n uniform on (0, 1) from ``seed``
    """

    kind: ProfileKind
    base: float | None = None
    epsilon: float | None = None
    j0: float = 1.0
    alpha_power: float = 2.0
    alphas: tuple | None = None
    values: tuple | None = None
    delta: float | None = None
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", ProfileKind(self.kind))
        except ValueError:
            raise InvalidProfile(f"unknown profile kind {self.kind!r}")
        if self.alphas is not None:
            object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.values is not None:
            object.__setattr__(self, "values", tuple(self.values))
        self._validate()

    def _validate(self):
        kind = self.kind
        if kind in (ProfileKind.GAUSSIAN, ProfileKind.EXPONENTIAL):
            if self.base is not None and not self.base > 1:
                raise InvalidProfile(f"{kind.value}: base must be > 1, got {self.base}")
        elif kind == ProfileKind.POWER_OF_EPSILON:
            self._check_epsilon()
            if self.alphas is not None:
                if any(b <= a for a, b in zip(self.alphas, self.alphas[1:])):
                    raise InvalidProfile("power-of-epsilon: alphas must be strictly increasing")
            elif not self.alpha_power > 0:
                raise InvalidProfile(f"power-of-epsilon: alpha_power must be > 0, got {self.alpha_power}")
        elif kind == ProfileKind.RG_SCHEME:
            self._check_epsilon()
            if not self.j0 > 0:
                raise InvalidProfile(f"rg-scheme: j0 must be > 0, got {self.j0}")
        elif kind == ProfileKind.EXPLICIT:
            if not self.values:
                raise InvalidProfile("explicit: values must be a non-empty list")
        elif kind == ProfileKind.RANDOM_STRONG_DISORDER:
            if self.delta is None or not self.delta >= 1:
                raise InvalidProfile(f"random-strong-disorder: delta must be >= 1, got {self.delta}")
            if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
                raise InvalidProfile(f"random-strong-disorder: seed must be a non-negative integer, got {self.seed!r}")

    def _check_epsilon(self):
        if self.epsilon is None or not 0 < self.epsilon < 1:
            raise InvalidProfile(f"{self.kind.value}: epsilon must lie in (0, 1), got {self.epsilon}")

    # ── Evaluation ────────────────────────────────────────────────────────

    def couplings(self, count: int, precision: Precision = DOUBLE) -> tuple[list, bool]:
        """J_0 .. J_{count-1} at ``precision`` and whether any underflowed to zero."""
        if self.kind == ProfileKind.EXPLICIT:
            if len(self.values) != count:
                raise InvalidProfile(f"explicit: need {count} values, got {len(self.values)}")
            return [precision.number(v) for v in self.values], False

        exponents = self._log_couplings(count, precision)
        values, underflow = [], False
        for exponent in exponents:
            value, flag = precision.exp_checked(exponent)
            values.append(value)
            underflow = underflow or flag
        return values, underflow

    def _log_couplings(self, count: int, precision: Precision) -> list:
        kind = self.kind
        with precision.context():
            if kind in (ProfileKind.GAUSSIAN, ProfileKind.EXPONENTIAL):
                log_base = precision.number(1) if self.base is None else precision.log(self.base)
                power = 2 if kind == ProfileKind.GAUSSIAN else 1
                return [-(n ** power) * log_base for n in range(count)]

            if kind == ProfileKind.POWER_OF_EPSILON:
                log_eps = precision.log(self.epsilon)
                if self.alphas is not None:
                    if len(self.alphas) < count:
                        raise InvalidProfile(f"power-of-epsilon: need {count} alphas, got {len(self.alphas)}")
                    alphas = self.alphas[:count]
                else:
                    alphas = [n ** self.alpha_power for n in range(count)]
                return [precision.number(a) * log_eps for a in alphas]

            if kind == ProfileKind.RG_SCHEME:
                log_eps = precision.log(self.epsilon)
                log_j0 = precision.log(self.j0)
                step = 2 * log_eps - precision.log(2)
                return [log_j0] + [log_eps + (i - 1) * step + log_j0 for i in range(1, count)]

            # random-strong-disorder
            u = np.random.default_rng(self.seed).uniform(_UNIFORM_FLOOR, 1.0, size=count)
            delta = precision.number(self.delta)
            return [delta * precision.log(x) for x in u]

    # ── Serialization ─────────────────────────────────────────────────────

    def to_document(self) -> dict:
        doc = {"kind": self.kind.value}
        for key in ("base", "epsilon", "alphas", "values", "delta"):
            value = getattr(self, key)
            if value is not None:
                doc[key] = list(value) if isinstance(value, tuple) else value
        if self.kind == ProfileKind.RG_SCHEME:
            doc["j0"] = self.j0
        if self.kind == ProfileKind.POWER_OF_EPSILON and self.alphas is None:
            doc["alpha_power"] = self.alpha_power
        if self.kind == ProfileKind.RANDOM_STRONG_DISORDER:
            doc["seed"] = int(self.seed)
        if "values" in doc:
            doc["values"] = [str(v) for v in doc["values"]]
        return doc

    @classmethod
    def from_document(cls, document: dict) -> "CouplingProfile":
        unknown = set(document) - _PROFILE_KEYS
        if unknown:
            raise InvalidProfile(f"unknown profile keys: {sorted(unknown)}")
        if "kind" not in document:
            raise InvalidProfile("profile needs a 'kind'")
        params = dict(document)
        if params.get("base") == "e":
            params["base"] = None
        for key in ("alphas", "values"):
            if params.get(key) is not None:
                params[key] = tuple(params[key])
        try:
            return cls(**params)
        except TypeError as e:
            raise InvalidProfile(f"bad profile parameters: {e}") from e


# ─── Chain builders ──────────────────────────────────────────────────────────

def build_concentric_chain(n_sites: int, profile: CouplingProfile, precision: Precision = DOUBLE) -> ChainSpec:
    """
    Mirror-symmetric XX chain at zero field: J_0 on the central bond
    (sites N/2, N/2+1) and J_i on the two bonds i steps away from it.
    """
    if not isinstance(n_sites, (int, np.integer)) or n_sites < 2 or n_sites % 2:
        raise InvalidChain(f"concentric chains need an even n_sites >= 2, got {n_sites!r}")

    half = n_sites // 2
    couplings, underflow = profile.couplings(half, precision)
    bonds = couplings[:0:-1] + couplings
    if underflow:
        log.warning(f"{profile.kind.value} couplings underflow double precision at N={n_sites}; stored as 0")

    return ChainSpec.xx(
        bonds,
        precision=precision,
        provenance={"builder": "concentric", "profile": profile.to_document()},
        underflow=underflow,
    )


def sample_strong_disorder_chain(n_sites: int, delta: float, seed: int, precision: Precision = DOUBLE) -> ChainSpec:
    """XX chain with J_i = u_i^delta, u_i uniform on (0, 1); deterministic per seed."""
    if not isinstance(n_sites, (int, np.integer)) or n_sites < 2:
        raise InvalidChain(f"n_sites must be >= 2, got {n_sites!r}")
    profile = CouplingProfile(ProfileKind.RANDOM_STRONG_DISORDER, delta=delta, seed=seed)
    couplings, underflow = profile.couplings(n_sites - 1, precision)
    if underflow:
        log.warning(f"strong-disorder couplings underflow at delta={delta}, seed={seed}; stored as 0")
    return ChainSpec.xx(
        couplings,
        precision=precision,
        provenance={"builder": "strong-disorder", "profile": profile.to_document()},
        underflow=underflow,
    )


def uniform_chain(n_sites: int, coupling: float = 1.0, field: float = 0.0) -> ChainSpec:
    """Homogeneous XX chain, the clean critical reference."""
    if n_sites < 1:
        raise InvalidChain(f"n_sites must be positive, got {n_sites}")
    return ChainSpec.xx(
        [coupling] * (n_sites - 1),
        field=[field] * n_sites,
        provenance={"builder": "uniform", "coupling": coupling, "field": field},
    )
