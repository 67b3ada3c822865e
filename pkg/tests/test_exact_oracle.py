import math

import numpy as np
import pytest
import scipy.linalg

from src.chain.spec import ChainSpec
from src.errors import FirstOrderNotZero, InvalidBlock, InvalidSubspace, PhysicalityViolation, TooLarge
from src.oracle.hamiltonian import Convention, build_dense_hamiltonian, four_spin_problem, site_bits
from src.oracle.perturbation import degenerate_pt2, effective_hamiltonian_projection
from src.oracle.states import (
    DenseState,
    complement,
    contiguous_block_entropies,
    entropy_vn,
    ground_state,
    reduced_density,
    singlet_product_state,
)
from src.rg.decimation import decimate
from src.rg.pairing import concentric_pairing, pairing_entropy


class TestDenseHamiltonian:
    def test_site_bits_most_significant_first(self):
        np.testing.assert_array_equal(site_bits(2, 1), [0, 0, 1, 1])
        np.testing.assert_array_equal(site_bits(2, 2), [0, 1, 0, 1])

    def test_symmetric(self, rng, make_xy_chain):
        h = build_dense_hamiltonian(make_xy_chain(rng, 6))
        assert h.shape == (64, 64)
        np.testing.assert_array_equal(h, h.T)

    def test_two_site_spectrum(self):
        values = scipy.linalg.eigvalsh(build_dense_hamiltonian(ChainSpec.xx([1.0])))
        np.testing.assert_allclose(values, [-2.0, 0.0, 0.0, 2.0], atol=1e-14)

    def test_field_sign(self):
        h = build_dense_hamiltonian(ChainSpec(1, [], [], [0.3]))
        np.testing.assert_allclose(np.diag(h), [-0.3, 0.3])

    def test_half_convention_is_unit_with_halved_couplings(self, rng, make_xy_chain):
        chain = make_xy_chain(rng, 5)
        half = scipy.linalg.eigvalsh(build_dense_hamiltonian(chain, Convention.HALF))
        unit = scipy.linalg.eigvalsh(build_dense_hamiltonian(chain.scaled_couplings(0.5), "unit"))
        np.testing.assert_allclose(half, unit, atol=1e-12)

    def test_size_cap(self):
        with pytest.raises(TooLarge):
            build_dense_hamiltonian(ChainSpec.xx([1.0] * 14))

    def test_unknown_convention(self):
        with pytest.raises(ValueError):
            build_dense_hamiltonian(ChainSpec.xx([1.0]), "quarter")


class TestDenseStates:
    def test_singlet_ground_state(self):
        state = ground_state(build_dense_hamiltonian(ChainSpec.xx([1.0])))
        assert state.n_sites == 2
        assert state.energy == pytest.approx(-2.0)
        assert not state.degenerate
        assert abs(state.amplitudes[1]) == pytest.approx(1 / math.sqrt(2))
        assert state.amplitudes[1] == pytest.approx(-state.amplitudes[2])

    def test_zero_mode_chain_is_degenerate(self):
        assert ground_state(build_dense_hamiltonian(ChainSpec.xx([1.0, 1.0]))).degenerate

    def test_unnormalized_state_is_rejected(self):
        with pytest.raises(PhysicalityViolation):
            DenseState(1, np.array([1.0, 1.0]), 0.0)

    def test_reduced_density_is_a_density_matrix(self, rng, make_xy_chain):
        state = ground_state(build_dense_hamiltonian(make_xy_chain(rng, 6)))
        rho = reduced_density(state, [2, 5])
        assert rho.shape == (4, 4)
        assert np.trace(rho) == pytest.approx(1.0)
        np.testing.assert_allclose(rho, rho.T, atol=1e-15)
        assert scipy.linalg.eigvalsh(rho).min() > -1e-12

    def test_pure_state_entropy_is_symmetric(self, rng, make_xy_chain):
        state = ground_state(build_dense_hamiltonian(make_xy_chain(rng, 7)))
        for block in ([1], [2, 3], [1, 4, 6]):
            inside = entropy_vn(reduced_density(state, block))
            outside = entropy_vn(reduced_density(state, complement(7, block)))
            assert inside == pytest.approx(outside, abs=1e-9)

    @pytest.mark.parametrize("block", [[], [0], [5], [1, 1], [1, 2, 3, 4]])
    def test_bad_blocks(self, block):
        state = ground_state(build_dense_hamiltonian(ChainSpec.xx([1.0, 0.5, 1.0])))
        with pytest.raises(InvalidBlock):
            reduced_density(state, block)

    def test_complement(self):
        assert complement(4, [3, 2]) == (1, 4)

    def test_entropy_of_mixed_and_pure(self):
        assert entropy_vn(np.eye(4) / 4) == pytest.approx(2.0)
        assert entropy_vn(np.diag([1.0, 0.0])) == pytest.approx(0.0, abs=1e-15)
        with pytest.raises(PhysicalityViolation):
            entropy_vn(np.diag([1.5, -0.5]))

    def test_singlet_products_carry_one_bit_per_cut(self, rng):
        pairing = decimate(ChainSpec.xx(rng.uniform(0.05, 1.0, 7)))
        entropies = contiguous_block_entropies(singlet_product_state(pairing))
        assert len(entropies) == sum(8 - length + 1 for length in range(1, 8))
        for (start, length), value in entropies.items():
            assert value == pytest.approx(pairing_entropy(pairing, start, length), abs=1e-10)


class TestFourSpinPerturbation:
    """Chain {λ, 1, λ}: the central singlet is fixed and the edge spins pair at second order."""

    @pytest.fixture(scope="class")
    def result(self):
        h0, v, basis = four_spin_problem()
        return degenerate_pt2(h0, v, basis)

    def test_basis_is_an_eigenspace(self):
        h0, _, basis = four_spin_problem()
        np.testing.assert_allclose(effective_hamiltonian_projection(h0, basis), -2.0 * np.eye(4), atol=1e-14)

    def test_effective_matrix(self, result):
        expected = -2.0 * np.array([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, -1.0, 0.0],
            [0.0, -1.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
        np.testing.assert_allclose(result.effective_matrix, expected, atol=1e-12)
        np.testing.assert_allclose(result.second_order_shifts, [-4.0, -2.0, -2.0, 0.0], atol=1e-12)
        assert result.unperturbed_energy == pytest.approx(-2.0)
        assert result.subspace_dim == 4

    @pytest.mark.parametrize("coupling", [0.02, 0.05, 0.1])
    def test_energy_against_exact(self, result, coupling):
        exact = ground_state(build_dense_hamiltonian(ChainSpec.xx([coupling, 1.0, coupling]))).energy
        assert exact == pytest.approx(-2.0 * math.sqrt(1.0 + 4.0 * coupling**2), abs=1e-12)
        assert abs(result.corrected_energies(coupling)[0] - exact) <= 10 * coupling**3

    @pytest.mark.parametrize("coupling", [0.02, 0.05, 0.1])
    def test_ground_state_lies_in_the_split_level(self, result, coupling):
        basis = four_spin_problem()[2]
        _, vectors = scipy.linalg.eigh(result.effective_matrix)
        target = basis @ vectors[:, 0]
        state = ground_state(build_dense_hamiltonian(ChainSpec.xx([coupling, 1.0, coupling])))
        assert float(np.dot(target, state.amplitudes)) ** 2 >= 1.0 - 3.0 * coupling**2

    def test_split_level_is_the_edge_singlet(self, result):
        basis = four_spin_problem()[2]
        _, vectors = scipy.linalg.eigh(result.effective_matrix)
        target = basis @ vectors[:, 0]
        edge_singlet = singlet_product_state(concentric_pairing(4)).amplitudes
        assert abs(float(np.dot(target, edge_singlet))) == pytest.approx(1.0, abs=1e-12)

    def test_ground_state_entropies_follow_concentric_pairing(self):
        # weight outside the singlet product is O(λ²), so deviations stay near λ² log(1/λ²)
        state = ground_state(build_dense_hamiltonian(ChainSpec.xx([0.02, 1.0, 0.02])))
        pairing = concentric_pairing(4)
        for (start, length), value in contiguous_block_entropies(state).items():
            assert value == pytest.approx(pairing_entropy(pairing, start, length), abs=0.025)

    def test_nonvanishing_first_order(self):
        h0, _, basis = four_spin_problem()
        with pytest.raises(FirstOrderNotZero):
            degenerate_pt2(h0, h0, basis)

    def test_basis_outside_eigenspace(self):
        h0, v, _ = four_spin_problem()
        with pytest.raises(InvalidSubspace):
            degenerate_pt2(h0, v, np.eye(16)[:, [0, 4]])

    def test_non_orthonormal_basis(self):
        with pytest.raises(InvalidSubspace):
            effective_hamiltonian_projection(np.eye(2), [[1.0, 0.0], [1.0, 1.0]])
