import numpy as np
import pytest

from src.chain.precision import Precision
from src.chain.profiles import CouplingProfile, build_concentric_chain
from src.chain.spec import ChainSpec
from src.fermions.fallback import SolverFallbackChain


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_xy_chain():
    """Anisotropic chain with field; couplings bounded away from zero."""
    def make(rng: np.random.Generator, n_sites: int) -> ChainSpec:
        return ChainSpec(
            n_sites,
            rng.uniform(0.2, 1.0, n_sites - 1),
            rng.uniform(0.2, 1.0, n_sites - 1),
            rng.uniform(0.0, 0.5, n_sites),
        )
    return make


@pytest.fixture(scope="session")
def gaussian_solution():
    chain = build_concentric_chain(20, CouplingProfile("gaussian"))
    return SolverFallbackChain().solve(chain)


@pytest.fixture(scope="session")
def exponential_solution():
    chain = build_concentric_chain(20, CouplingProfile("exponential"), Precision(256))
    return SolverFallbackChain().solve(chain)
