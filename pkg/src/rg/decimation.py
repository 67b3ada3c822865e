"""
Strongest-Bond Decimation
=========================
Real-space RG for open XX chains. The strongest active bond J_max between
neighbours l, r is frozen into a singlet; the bonds J_left, J_right that
touched the pair are replaced by one effective bond

    J~ = J_left J_right / (2 J_max)

between the outer neighbours. At a chain edge the pair is removed and no
bond is created. Everything runs on log-couplings.
"""

import math

from src.chain.spec import ChainSpec
from src.config import get_logger
from src.errors import InvalidChain, UnsupportedModel
from src.rg.pairing import DecimationStep, SingletPairing

log = get_logger("RG")

_LOG2 = math.log(2.0)


def effective_coupling(j_left: float, j_right: float, j_max: float) -> float:
    return j_left * j_right / (2.0 * j_max)


def _log_couplings(chain: ChainSpec) -> list[float]:
    precision = chain.precision
    return [float(precision.log(j)) for j in chain.jx]


def decimate(chain: ChainSpec) -> SingletPairing:
    """Run decimation to completion. Ties go to the lowest site index."""
    n = chain.n_sites
    if n % 2:
        raise InvalidChain(f"decimation needs an even number of sites, got {n}")
    if not chain.is_xx or not chain.has_zero_field:
        raise UnsupportedModel("decimation handles XX chains (Jx = Jy) at zero field only")
    if any(j <= 0 for j in chain.jx):
        raise InvalidChain("decimation needs strictly positive couplings")

    sites = list(range(1, n + 1))
    bonds = _log_couplings(chain)   # bonds[b] joins sites[b] and sites[b + 1]
    steps = []

    while sites:
        b = max(range(len(bonds)), key=bonds.__getitem__)
        log_max = bonds[b]
        left, right = sites[b], sites[b + 1]
        has_left, has_right = b > 0, b + 1 < len(bonds)

        if has_left and has_right:
            log_new = bonds[b - 1] + bonds[b + 1] - _LOG2 - log_max
            bonds[b - 1:b + 2] = [log_new]
        else:
            log_new = None
            lo = b - 1 if has_left else b
            hi = b + 2 if has_right else b + 1
            del bonds[lo:hi]
        del sites[b:b + 2]
        steps.append(DecimationStep(left, right, log_max, log_new))

    log.debug(f"decimated N={n}: first singlet {steps[0].left_site}-{steps[0].right_site}")
    return SingletPairing(n, tuple((s.left_site, s.right_site) for s in steps), tuple(steps))


def iterate_effective_couplings(j0, couplings, *, log_space: bool = False):
    """
    Symmetric-chain recursion J~_0 = J_0, J~_i = J_i^2 / (2 J~_{i-1}).

    Yields J~_1, J~_2, ... (their natural logs with ``log_space=True``).
    """
    current = math.log(j0)
    for j in couplings:
        current = 2.0 * math.log(j) - _LOG2 - current
        yield current if log_space else math.exp(current)
