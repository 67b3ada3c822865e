"""Free-fermion pipeline against dense diagonalization on small random chains."""

import numpy as np
import pytest

from src.chain.spec import ChainSpec
from src.entanglement.profile import entropy_profile
from src.errors import DegenerateGroundState
from src.fermions.fallback import SolverFallbackChain
from src.fermions.solver import ground_energy
from src.oracle.hamiltonian import Convention, build_dense_hamiltonian
from src.oracle.states import contiguous_block_entropies, ground_state

TOLERANCE = 1e-8


def _random_chain(seed: int) -> ChainSpec:
    rng = np.random.default_rng(seed)
    n_sites = int(rng.choice([4, 6, 8, 10]))
    return ChainSpec(
        n_sites,
        rng.uniform(0.2, 1.0, n_sites - 1),
        rng.uniform(0.2, 1.0, n_sites - 1),
        rng.uniform(0.0, 0.5, n_sites),
    )


def _compare(chain: ChainSpec, dense_chain: ChainSpec, convention: Convention):
    state = ground_state(build_dense_hamiltonian(dense_chain, convention))
    if state.degenerate:
        pytest.skip("dense ground state is degenerate")
    try:
        solution = SolverFallbackChain().solve(chain)
    except DegenerateGroundState:
        pytest.skip("free-fermion vacuum is degenerate")

    assert ground_energy(solution.modes) == pytest.approx(state.energy, abs=TOLERANCE)
    curve = entropy_profile(solution.correlation)
    for (start, length), expected in contiguous_block_entropies(state).items():
        assert curve.entropies(length)[start - 1] == pytest.approx(expected, abs=TOLERANCE), (start, length)


@pytest.mark.parametrize("seed", range(50))
def test_random_chain_agrees_with_dense(seed):
    chain = _random_chain(seed)
    _compare(chain, chain, Convention.UNIT)


@pytest.mark.parametrize("seed", range(5))
def test_half_convention_through_halved_couplings(seed):
    chain = _random_chain(1000 + seed)
    _compare(chain.scaled_couplings(0.5), chain, Convention.HALF)


def test_concentric_rg_chain_agrees_with_dense():
    chain = ChainSpec.xx([0.01, 0.1, 1.0, 0.1, 0.01])
    _compare(chain, chain, Convention.UNIT)
