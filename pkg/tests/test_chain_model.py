import math

import numpy as np
import pytest

from src.chain.precision import DOUBLE, Precision, to_double
from src.chain.profiles import (
    CouplingProfile,
    ProfileKind,
    build_concentric_chain,
    sample_strong_disorder_chain,
    uniform_chain,
)
from src.chain.quadratic import assemble_quadratic_form
from src.chain.spec import ChainSpec
from src.errors import InvalidChain, InvalidProfile


class TestPrecision:
    def test_default_is_machine_double(self):
        assert Precision().is_double
        assert Precision() == DOUBLE
        assert DOUBLE.decimal_digits == 17

    def test_rejects_fewer_than_double_bits(self):
        with pytest.raises(InvalidChain):
            Precision(52)

    def test_extended_zero_mode_tolerance_scales_with_bits(self):
        assert Precision(256).zero_mode_tolerance == 2.0 ** (13 - 256)
        assert Precision(1024).zero_mode_tolerance < Precision(256).zero_mode_tolerance

    def test_double_exp_reports_underflow(self):
        assert DOUBLE.exp_checked(-800.0) == (0.0, True)
        value, underflow = DOUBLE.exp_checked(-1.0)
        assert value == math.exp(-1.0) and not underflow

    def test_extended_exp_does_not_underflow(self):
        value, underflow = Precision(256).exp_checked(-800)
        assert not underflow
        assert value > 0

    def test_extended_arrays_are_read_only_and_convert_back(self):
        arr = Precision(128).array([0.5, 0.25])
        assert arr.dtype == object
        assert not arr.flags.writeable
        np.testing.assert_array_equal(to_double(arr), [0.5, 0.25])


class TestChainSpec:
    def test_xx_constructor(self):
        chain = ChainSpec.xx([1.0, 2.0])
        assert chain.n_sites == 3
        assert chain.n_bonds == 2
        assert chain.is_xx and chain.has_zero_field

    @pytest.mark.parametrize(
        "jx, jy, field",
        [
            ([1.0], [1.0, 1.0], [0.0, 0.0, 0.0]),
            ([1.0, 1.0], [1.0, 1.0], [0.0, 0.0]),
            ([1.0, math.nan], [1.0, 1.0], [0.0, 0.0, 0.0]),
            ([1.0, 1.0], [1.0, math.inf], [0.0, 0.0, 0.0]),
        ],
    )
    def test_rejects_bad_arrays(self, jx, jy, field):
        with pytest.raises(InvalidChain):
            ChainSpec(3, jx, jy, field)

    def test_rejects_nonpositive_site_count(self):
        with pytest.raises(InvalidChain):
            ChainSpec(0, [], [], [])

    def test_arrays_are_read_only(self):
        chain = ChainSpec.xx([1.0, 2.0])
        with pytest.raises(ValueError):
            chain.jx[0] = 5.0

    def test_json_keeps_extended_digits(self):
        precision = Precision(256)
        with precision.context():
            third = precision.number(1) / 3
        chain = ChainSpec.xx([third, third], precision=precision, provenance={"note": "thirds"})
        restored = ChainSpec.from_json(chain.to_json())
        assert restored == chain
        assert restored.jx[0] != 1.0 / 3.0

    def test_from_json_reports_syntax_errors(self):
        with pytest.raises(InvalidChain, match="line"):
            ChainSpec.from_json("{\n  \"n_sites\": 2,\n")

    def test_from_document_rejects_unknown_keys(self):
        doc = ChainSpec.xx([1.0]).to_document()
        doc["periodic"] = True
        with pytest.raises(InvalidChain, match="periodic"):
            ChainSpec.from_document(doc)

    def test_reversed_mirrors_bonds_and_fields(self):
        chain = ChainSpec(3, [1.0, 2.0], [0.5, 0.1], [0.1, 0.2, 0.3])
        mirror = chain.reversed()
        np.testing.assert_array_equal(mirror.jx, [2.0, 1.0])
        np.testing.assert_array_equal(mirror.jy, [0.1, 0.5])
        np.testing.assert_array_equal(mirror.field, [0.3, 0.2, 0.1])

    def test_precision_round_trip_is_exact(self):
        chain = ChainSpec(3, [0.3, 0.7], [0.1, 0.9], [0.2, 0.0, 0.4])
        assert chain.with_precision(Precision(256)).with_precision(DOUBLE) == chain

    def test_scaled_couplings_leave_fields(self):
        chain = ChainSpec(3, [1.0, 2.0], [0.5, 0.1], [0.1, 0.2, 0.3]).scaled_couplings(0.5)
        np.testing.assert_array_equal(chain.jx, [0.5, 1.0])
        np.testing.assert_array_equal(chain.jy, [0.25, 0.05])
        np.testing.assert_array_equal(chain.field, [0.1, 0.2, 0.3])


class TestCouplingProfile:
    def test_gaussian(self):
        values, underflow = CouplingProfile("gaussian").couplings(4)
        assert values == [1.0, math.exp(-1.0), math.exp(-4.0), math.exp(-9.0)]
        assert not underflow

    def test_exponential_with_base(self):
        values, _ = CouplingProfile("exponential", base=10.0).couplings(3)
        assert values == pytest.approx([1.0, 0.1, 0.01], rel=1e-12)

    def test_power_of_epsilon_default_exponent(self):
        values, _ = CouplingProfile("power-of-epsilon", epsilon=0.5).couplings(3)
        assert values == pytest.approx([1.0, 0.5, 0.0625], rel=1e-12)

    def test_power_of_epsilon_at_inverse_e_is_gaussian(self):
        values, _ = CouplingProfile("power-of-epsilon", epsilon=math.exp(-1.0)).couplings(6)
        gaussian, _ = CouplingProfile("gaussian").couplings(6)
        assert values == pytest.approx(gaussian, rel=1e-12)

    def test_power_of_epsilon_explicit_alphas(self):
        profile = CouplingProfile("power-of-epsilon", epsilon=0.1, alphas=[0, 1, 3])
        values, _ = profile.couplings(3)
        assert values == pytest.approx([1.0, 0.1, 1e-3], rel=1e-12)

    def test_power_of_epsilon_rejects_unsorted_alphas(self):
        with pytest.raises(InvalidProfile):
            CouplingProfile("power-of-epsilon", epsilon=0.1, alphas=[0, 2, 1])

    def test_rg_scheme_follows_effective_couplings(self):
        values, _ = CouplingProfile("rg-scheme", epsilon=0.1, j0=1.0).couplings(4)
        assert values == pytest.approx([1.0, 0.1, 5e-4, 2.5e-6], rel=1e-12)

    @pytest.mark.parametrize("epsilon", [0.0, 1.0, 1.5, None])
    def test_epsilon_range(self, epsilon):
        with pytest.raises(InvalidProfile):
            CouplingProfile("rg-scheme", epsilon=epsilon)

    def test_explicit_length_must_match(self):
        profile = CouplingProfile("explicit", values=[0.3, 0.2])
        assert profile.couplings(2)[0] == [0.3, 0.2]
        with pytest.raises(InvalidProfile):
            profile.couplings(3)

    def test_random_is_deterministic_per_seed(self):
        a, _ = CouplingProfile("random-strong-disorder", delta=5.0, seed=3).couplings(50)
        b, _ = CouplingProfile("random-strong-disorder", delta=5.0, seed=3).couplings(50)
        c, _ = CouplingProfile("random-strong-disorder", delta=5.0, seed=4).couplings(50)
        assert a == b
        assert a != c
        assert all(0 < v <= 1 for v in a)

    def test_random_needs_delta_of_at_least_one(self):
        with pytest.raises(InvalidProfile):
            CouplingProfile("random-strong-disorder", delta=0.5)

    def test_unknown_kind(self):
        with pytest.raises(InvalidProfile):
            CouplingProfile("lorentzian")

    def test_from_document(self):
        profile = CouplingProfile.from_document({"kind": "gaussian", "base": "e"})
        assert profile.kind == ProfileKind.GAUSSIAN
        assert profile.base is None
        with pytest.raises(InvalidProfile, match="perodic"):
            CouplingProfile.from_document({"kind": "gaussian", "perodic": True})


class TestChainBuilders:
    def test_concentric_layout(self):
        chain = build_concentric_chain(6, CouplingProfile("gaussian"))
        j0, j1, j2 = 1.0, math.exp(-1.0), math.exp(-4.0)
        np.testing.assert_array_equal(chain.jx, [j2, j1, j0, j1, j2])
        assert chain.is_xx and chain.has_zero_field

    @pytest.mark.parametrize("kind, params", [
        ("gaussian", {}),
        ("exponential", {}),
        ("rg-scheme", {"epsilon": 0.2}),
        ("power-of-epsilon", {"epsilon": 0.3}),
    ])
    def test_mirror_symmetry(self, kind, params):
        chain = build_concentric_chain(16, CouplingProfile(kind, **params))
        np.testing.assert_array_equal(chain.jx, chain.jx[::-1])

    @pytest.mark.parametrize("n_sites", [0, 3, 7])
    def test_concentric_needs_even_n(self, n_sites):
        with pytest.raises(InvalidChain):
            build_concentric_chain(n_sites, CouplingProfile("gaussian"))

    def test_gaussian_underflow_in_double(self):
        chain = build_concentric_chain(60, CouplingProfile("gaussian"))
        assert chain.underflow
        assert chain.jx[0] == 0.0

    def test_extended_precision_keeps_small_couplings(self):
        chain = build_concentric_chain(60, CouplingProfile("gaussian"), Precision(256))
        assert not chain.underflow
        assert chain.jx[0] > 0

    def test_strong_disorder_chain(self):
        chain = sample_strong_disorder_chain(10, 5.0, seed=1)
        assert chain.n_sites == 10
        assert chain.is_xx and chain.has_zero_field
        assert chain == sample_strong_disorder_chain(10, 5.0, seed=1)

    def test_uniform_chain(self):
        chain = uniform_chain(5, coupling=0.5, field=0.1)
        np.testing.assert_array_equal(chain.jx, [0.5] * 4)
        np.testing.assert_array_equal(chain.field, [0.1] * 5)


class TestQuadraticForm:
    def test_matrix_entries(self):
        chain = ChainSpec(3, [1.0, 0.5], [0.2, 0.5], [0.1, 0.0, -0.3])
        qf = assemble_quadratic_form(chain)
        np.testing.assert_allclose(qf.a_matrix, [
            [0.2, 1.2, 0.0],
            [1.2, 0.0, 1.0],
            [0.0, 1.0, -0.6],
        ])
        np.testing.assert_allclose(qf.b_matrix, [
            [0.0, 0.8, 0.0],
            [-0.8, 0.0, 0.0],
            [0.0, 0.0, 0.0],
        ])

    def test_symmetry(self, rng, make_xy_chain):
        qf = assemble_quadratic_form(make_xy_chain(rng, 7))
        np.testing.assert_array_equal(qf.a_matrix, qf.a_matrix.T)
        np.testing.assert_array_equal(qf.b_matrix, -qf.b_matrix.T)
        np.testing.assert_array_equal(qf.m_plus().T, qf.m_minus())

    def test_tridiagonal(self, rng, make_xy_chain):
        qf = assemble_quadratic_form(make_xy_chain(rng, 8))
        for matrix in (qf.a_matrix, qf.b_matrix):
            assert not np.triu(matrix, k=2).any()
            assert not np.tril(matrix, k=-2).any()

    def test_extended_precision_form(self):
        chain = build_concentric_chain(4, CouplingProfile("gaussian"), Precision(128))
        qf = assemble_quadratic_form(chain)
        assert qf.precision.bits == 128
        assert qf.a_matrix.dtype == object
