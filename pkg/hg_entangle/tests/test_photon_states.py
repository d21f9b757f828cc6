"""Tests for HG-entangled states and the HG/LG change of basis."""

import math

import numpy as np
import pytest

from hg_entangle.exceptions import InputError, TruncationError
from hg_entangle.models.modes import LGIndex, ModeIndex
from hg_entangle.models.states import Basis, TwoPhotonState, labels_of_order
from hg_entangle.photon_states import (
    b_coefficient,
    build_hg_entangled_state,
    conversion_block,
    conversion_matrix,
    convert_state,
    flat_lg_coefficients,
    hg_lg_overlap,
    lg_spdc_state,
    quasi_conservation_filter,
    schmidt_coefficients,
    schmidt_entropy,
)
from hg_entangle.transverse_modes import hg_field_waist, lg_field_waist, plane_overlap

SQRT_HALF = 1 / math.sqrt(2)


@pytest.fixture
def low_order_state():
    """Gaussian-pump HG state at a = 0.25 truncated at order 1"""
    return build_hg_entangled_state(0.25, 1)


class TestBuildHGState:
    """Diagonal HG-entangled states"""

    def test_low_order_amplitudes(self, low_order_state):
        assert low_order_state.basis is Basis.HG
        assert low_order_state.norm() == pytest.approx(1.0, abs=1e-12)
        assert low_order_state.amplitude((0, 0), (0, 0)) == pytest.approx(0.6623, abs=1e-4)
        assert low_order_state.amplitude((1, 0), (1, 0)) == pytest.approx(0.5298, abs=1e-4)
        assert low_order_state.amplitude((0, 1), (0, 1)) == pytest.approx(0.5298, abs=1e-4)
        assert len(low_order_state.amplitudes) == 3

    def test_symmetric_under_exchange(self):
        assert build_hg_entangled_state(0.5, 4).is_symmetric()

    def test_invalid_arguments(self):
        with pytest.raises(InputError):
            build_hg_entangled_state(0.25, -1)
        with pytest.raises(InputError):
            build_hg_entangled_state(0.0, 2)


class TestOverlapFormula:
    """HG/LG overlaps from the b coefficients"""

    def test_b_coefficient_values(self):
        assert b_coefficient(1, 0, 1) == pytest.approx(-SQRT_HALF)
        assert b_coefficient(0, 1, 1) == pytest.approx(SQRT_HALF)
        assert b_coefficient(1, 1, 1) == 0.0
        assert b_coefficient(0, 0, 0) == 1.0

    def test_b_coefficient_range(self):
        with pytest.raises(InputError):
            b_coefficient(1, 1, 3)
        with pytest.raises(InputError):
            b_coefficient(-1, 2, 0)

    def test_unit_vortex(self):
        """LG_0^1 = (HG_1^0 + i HG_0^1) / sqrt(2)"""
        lg = LGIndex.of(0, 1)
        assert hg_lg_overlap(ModeIndex.of(1, 0), lg) == pytest.approx(SQRT_HALF)
        assert hg_lg_overlap(ModeIndex.of(0, 1), lg) == pytest.approx(1j * SQRT_HALF)

    def test_radial_mode(self):
        """LG_1^0 = -(HG_2^0 + HG_0^2) / sqrt(2)"""
        lg = LGIndex.of(1, 0)
        assert hg_lg_overlap(ModeIndex.of(2, 0), lg) == pytest.approx(-SQRT_HALF)
        assert hg_lg_overlap(ModeIndex.of(1, 1), lg) == 0
        assert hg_lg_overlap(ModeIndex.of(0, 2), lg) == pytest.approx(-SQRT_HALF)

    def test_second_order_vortex(self):
        lg = LGIndex.of(0, 2)
        values = [hg_lg_overlap(ModeIndex.of(*hg), lg) for hg in labels_of_order(Basis.HG, 2)]
        np.testing.assert_allclose(values, [0.5, 1j * SQRT_HALF, -0.5], atol=1e-15)

    def test_zero_across_orders(self):
        assert hg_lg_overlap(ModeIndex.of(1, 1), LGIndex.of(0, 1)) == 0

    @pytest.mark.parametrize("order", range(0, 5))
    def test_matches_field_overlaps(self, order, spec):
        """The closed form reproduces numerical overlaps of the fields"""
        for hg in labels_of_order(Basis.HG, order):
            for lg in labels_of_order(Basis.LG, order):
                hg_mode, lg_mode = ModeIndex.of(*hg), LGIndex.of(*lg)
                numeric = plane_overlap(
                    lambda x, y: hg_field_waist(hg_mode, 1.0, x, y),
                    lambda x, y: lg_field_waist(lg_mode, 1.0, x, y),
                    1.0,
                    spec,
                )
                assert abs(hg_lg_overlap(hg_mode, lg_mode) - numeric) < 1e-8, (hg, lg)


class TestConversionBlocks:
    """Unitary order blocks"""

    @pytest.mark.parametrize("order", range(0, 9))
    def test_unitary(self, order):
        block = conversion_block(order)
        assert block.matrix.shape == (order + 1, order + 1)
        assert block.unitarity_error() < 1e-10

    def test_labels(self):
        block = conversion_block(2)
        assert block.hg_labels == [(2, 0), (1, 1), (0, 2)]
        assert block.lg_labels == [(0, 2), (1, 0), (0, -2)]

    def test_aligned_vortex_is_positive_real(self):
        for order in range(1, 9):
            corner = conversion_block(order).matrix[0, 0]
            assert corner.real > 0
            assert corner.imag == 0

    def test_cap(self):
        conversion_block(16)
        with pytest.raises(TruncationError) as excinfo:
            conversion_block(17)
        assert excinfo.value.context["order"] == 17
        with pytest.raises(InputError):
            conversion_block(-1)

    def test_block_diagonal_matrix(self):
        matrix, hg_labels, lg_labels = conversion_matrix(2)
        assert matrix.shape == (6, 6)
        assert hg_labels[:3] == [(0, 0), (1, 0), (0, 1)]
        assert lg_labels[:3] == [(0, 0), (0, 1), (0, -1)]
        assert matrix[0, 1] == 0
        np.testing.assert_allclose(matrix.conj().T @ matrix, np.eye(6), atol=1e-12)


class TestConvertState:
    """Change of basis for two-photon states"""

    def test_fundamental_pair(self):
        state = TwoPhotonState(
            basis=Basis.LG, truncation_order=0, amplitudes={((0, 0), (0, 0)): 1.0 + 0j}
        )
        converted = convert_state(state, Basis.HG)
        assert converted.basis is Basis.HG
        assert converted.amplitudes == {((0, 0), (0, 0)): pytest.approx(1.0)}

    def test_round_trip(self):
        state = build_hg_entangled_state(0.4, 4)
        back = convert_state(convert_state(state, Basis.LG), Basis.HG)
        keys = set(state.amplitudes) | set(back.amplitudes)
        for signal, idler in keys:
            difference = state.amplitude(signal, idler) - back.amplitude(signal, idler)
            assert abs(difference) < 1e-10

    def test_same_basis_is_identity(self, low_order_state):
        assert convert_state(low_order_state, Basis.HG) is low_order_state

    def test_norm_preserved(self):
        state = lg_spdc_state({0: 1.0, 1: 0.5j, -2: -0.25}, l_max=2)
        converted = convert_state(state, Basis.HG)
        assert converted.norm() == pytest.approx(1.0, abs=1e-10)

    def test_unnormalized_rejected(self):
        state = TwoPhotonState(
            basis=Basis.HG, truncation_order=0, amplitudes={((0, 0), (0, 0)): 2.0 + 0j}
        )
        with pytest.raises(InputError):
            convert_state(state, Basis.LG)

    def test_truncation_beyond_blocks(self):
        state = lg_spdc_state({3: 1.0}, l_max=3)
        with pytest.raises(TruncationError):
            convert_state(state, Basis.HG, max_block_order=2)


class TestLGInputAndFilter:
    """OAM-entangled inputs and the diagonal projection"""

    def test_flat_coefficients(self):
        assert flat_lg_coefficients(1) == {-1: 1.0, 0: 1.0, 1: 1.0}

    def test_lg_state_labels(self):
        state = lg_spdc_state(flat_lg_coefficients(2), 2)
        assert state.basis is Basis.LG
        assert set(state.amplitudes) == {((0, l), (0, -l)) for l in range(-2, 3)}  # noqa: E741
        assert state.norm() == pytest.approx(1.0)

    def test_lg_state_errors(self):
        with pytest.raises(InputError):
            lg_spdc_state({3: 1.0}, l_max=2)
        with pytest.raises(InputError):
            lg_spdc_state({0: 0.0}, l_max=2)
        with pytest.raises(InputError):
            lg_spdc_state({0: 1.0}, l_max=-1)

    def test_filtered_flat_state_is_diagonal(self):
        """Converted OAM pairs project onto |HG_m^(|l|-m), HG_m^(|l|-m)> for |l| <= 2"""
        state = lg_spdc_state(flat_lg_coefficients(2), 2)
        converted = convert_state(state, Basis.HG)
        assert abs(converted.amplitude((2, 0), (0, 2)) * math.sqrt(5) + 0.5) < 1e-12

        filtered = quasi_conservation_filter(converted, normalize=False)
        assert all(signal == idler for signal, idler in filtered.amplitudes)
        expected = {(0, 0): 1.0, (1, 0): 1.0, (0, 1): 1.0, (2, 0): 0.5, (1, 1): 1.0, (0, 2): 0.5}
        assert {signal for signal, _ in filtered.amplitudes} == set(expected)
        for label, value in expected.items():
            amplitude = filtered.amplitude(label, label) * math.sqrt(5)
            assert amplitude == pytest.approx(value, abs=1e-12)

    def test_filter_normalizes(self):
        state = convert_state(lg_spdc_state(flat_lg_coefficients(2), 2), Basis.HG)
        assert quasi_conservation_filter(state).norm() == pytest.approx(1.0, abs=1e-12)

    def test_filter_needs_hg_basis(self):
        with pytest.raises(InputError):
            quasi_conservation_filter(lg_spdc_state({0: 1.0}, 0))

    def test_filter_without_diagonal(self):
        state = TwoPhotonState(
            basis=Basis.HG, truncation_order=1, amplitudes={((1, 0), (0, 1)): 1.0 + 0j}
        )
        with pytest.raises(InputError):
            quasi_conservation_filter(state)


class TestSchmidt:
    """Entanglement of pure two-photon states"""

    def test_low_order_entropy(self, low_order_state):
        weights = np.array([1.0, 0.64, 0.64]) / 2.28
        expected = float(-np.sum(weights * np.log2(weights)))
        assert schmidt_entropy(low_order_state) == pytest.approx(expected, abs=1e-12)
        assert schmidt_entropy(low_order_state) == pytest.approx(1.5504, abs=1e-3)

    def test_coefficients_descending(self, low_order_state):
        values = schmidt_coefficients(low_order_state)
        assert list(values) == sorted(values, reverse=True)
        assert values[0] == pytest.approx(1 / math.sqrt(2.28))

    def test_product_state(self):
        state = TwoPhotonState(
            basis=Basis.HG, truncation_order=0, amplitudes={((0, 0), (0, 0)): 1.0 + 0j}
        )
        assert schmidt_entropy(state) == 0.0

    def test_flat_oam_state(self):
        state = lg_spdc_state(flat_lg_coefficients(1), 1)
        assert schmidt_entropy(state) == pytest.approx(math.log2(3), abs=1e-12)

    def test_invariant_under_change_of_basis(self):
        state = lg_spdc_state({0: 1.0, 1: 0.6, -1: 0.6, 2: 0.3j}, l_max=2)
        converted = convert_state(state, Basis.HG)
        assert schmidt_entropy(converted) == pytest.approx(schmidt_entropy(state), abs=1e-10)

    def test_zero_state(self):
        state = TwoPhotonState(basis=Basis.HG, truncation_order=0)
        with pytest.raises(InputError):
            schmidt_entropy(state)
