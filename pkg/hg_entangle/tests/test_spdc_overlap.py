"""Tests for thin-crystal SPDC coefficients and conservation laws."""

import math
from fractions import Fraction

import numpy as np
import pytest

from hg_entangle.exceptions import ConvergenceError, InputError, QuadratureError
from hg_entangle.models.modes import ModeIndex, WaistRatio
from hg_entangle.models.quadrature import QuadratureSpec
from hg_entangle.models.spdc import ConservationLaw
from hg_entangle.special_math import SQRT_PI
from hg_entangle.spdc_overlap import (
    DEFAULT_TAIL_TERMS,
    analytic_P,
    coefficient_table,
    conservation_report,
    gaussian_pump_check,
    mode_match_probabilities,
    mode_match_probability,
    quadrature_P,
    rational_waist_ratio,
    thin_crystal_coefficient,
)

GAUSSIAN = ModeIndex.of(0, 0)


def _q_closed_form(m, a):
    """Q_m(a) = P(m, m; a)^2 / (sqrt(pi) P(m, m; 2a))."""
    return analytic_P(m, m, a) ** 2 / (SQRT_PI * analytic_P(m, m, 2 * a))


class TestAnalyticP:
    """Closed-form per-axis amplitude"""

    @pytest.mark.parametrize("a", [0.05, 0.25, 1.0, 3.0])
    def test_low_order_closed_forms(self, a):
        b = 1.0 + a
        assert analytic_P(0, 0, a) == pytest.approx(math.sqrt(math.pi / b), rel=1e-14)
        assert analytic_P(1, 1, a) == pytest.approx(SQRT_PI / b**1.5, rel=1e-14)
        assert analytic_P(0, 2, a) == pytest.approx(
            -a * SQRT_PI / (math.sqrt(2) * b**1.5), rel=1e-14
        )

    def test_symmetric_in_indices(self):
        assert analytic_P(2, 6, 0.4) == analytic_P(6, 2, 0.4)

    def test_odd_total_vanishes(self):
        assert analytic_P(1, 2, 0.3) == 0.0
        assert analytic_P(0, 7, 0.3) == 0.0

    def test_accepts_waist_ratio(self):
        assert analytic_P(2, 2, WaistRatio(value=0.5)) == analytic_P(2, 2, 0.5)

    @pytest.mark.parametrize("a", [0.05, 0.25, 1.0])
    def test_matches_quadrature_ratios(self, a):
        """Analytic and quadrature ratios to P(0, 0) agree for indices up to 8"""
        reference_analytic = analytic_P(0, 0, a)
        reference_quadrature = quadrature_P(0, 0, a)
        for m in range(9):
            for n in range(9):
                analytic = analytic_P(m, n, a) / reference_analytic
                numeric = quadrature_P(m, n, a) / reference_quadrature
                assert abs(analytic - numeric) < 1e-8, (m, n)

    def test_high_indices_stay_accurate(self):
        """Exact rational summation survives the alternating cancellation"""
        value = analytic_P(60, 60, 0.5)
        assert math.isfinite(value)
        assert value == pytest.approx(quadrature_P(60, 60, 0.5), rel=1e-9)

    def test_negative_index_rejected(self):
        with pytest.raises(InputError):
            analytic_P(-1, 0, 0.5)
        with pytest.raises(InputError):
            quadrature_P(0, -2, 0.5)

    @pytest.mark.parametrize("a", [0.0, -0.5, float("inf"), float("nan")])
    def test_invalid_waist_ratio(self, a):
        with pytest.raises(InputError):
            analytic_P(0, 0, a)

    def test_quadrature_degree_check(self):
        with pytest.raises(QuadratureError):
            quadrature_P(4, 4, 0.5, QuadratureSpec(rule_order=4))

    def test_decimal_ratios_read_as_small_rationals(self):
        assert rational_waist_ratio(0.01) == Fraction(1, 100)
        assert rational_waist_ratio(0.1 + 0.2) == Fraction(3, 10)
        assert abs(float(rational_waist_ratio(1 / 3)) - 1 / 3) <= 1e-15
        assert analytic_P(4, 2, 0.1 + 0.2) == analytic_P(4, 2, 0.3)


class TestModeMatchProbability:
    """Q_m, the chance that the idler matches the signal's index"""

    @pytest.mark.parametrize("a", [0.01, 0.25, 0.5, 1.0])
    def test_closed_forms(self, a):
        assert mode_match_probability(0, a) == pytest.approx(
            math.sqrt(1 + 2 * a) / (1 + a), abs=1e-10
        )
        assert mode_match_probability(1, a) == pytest.approx(
            (1 + 2 * a) ** 1.5 / (1 + a) ** 3, abs=1e-10
        )
        assert mode_match_probability(2, a) == pytest.approx(_q_closed_form(2, a), abs=1e-10)

    def test_known_values(self):
        assert mode_match_probability(0, 0.25) == pytest.approx(0.9797958971, abs=1e-10)
        assert mode_match_probability(1, 0.25) == pytest.approx(0.940604061, abs=1e-9)

    def test_small_ratio_limit(self):
        for m in range(3):
            assert mode_match_probability(m, 0.001) > 0.999

    def test_non_increasing_in_a(self):
        grid = np.linspace(0.01, 1.0, 100)
        curves = mode_match_probabilities([0, 1, 2], grid)
        assert curves.shape == (100, 3)
        assert np.all(np.diff(curves, axis=0) <= 1e-12)
        assert np.all((curves > 0) & (curves <= 1))

    @pytest.mark.parametrize("a", [0.01, 0.05, 0.1])
    @pytest.mark.parametrize("m", range(5))
    def test_diagonal_dominates_small_ratio(self, m, a):
        """P(m, m)^2 outweighs all off-diagonal P(m, n)^2 over the default tail"""
        off_diagonal = math.fsum(
            analytic_P(m, n, a) ** 2 for n in range(DEFAULT_TAIL_TERMS + 1) if n != m
        )
        assert analytic_P(m, m, a) ** 2 > off_diagonal

    def test_higher_modes_match_less(self):
        q = mode_match_probabilities([0, 1, 2], [0.5])[0]
        assert q[0] > q[1] > q[2]

    def test_unconverged_tail(self):
        with pytest.raises(ConvergenceError) as excinfo:
            mode_match_probability(0, 1.0, n_max=4)
        assert excinfo.value.context["n_max"] == 4
        assert excinfo.value.context["m"] == 0
        assert excinfo.value.context["tail_ratio"] > 1e-12

    def test_tail_shorter_than_m(self):
        with pytest.raises(InputError):
            mode_match_probability(5, 0.5, n_max=3)

    def test_empty_m_list(self):
        with pytest.raises(InputError):
            mode_match_probabilities([], [0.5])


class TestThinCrystalCoefficient:
    """Single overlap integrals"""

    def test_fundamental_value(self):
        a = 0.25
        expected = (2 / math.pi) ** 1.5 * math.sqrt(a) * math.pi / (2 * (1 + a))
        value = thin_crystal_coefficient(GAUSSIAN, GAUSSIAN, GAUSSIAN, a)
        assert value == pytest.approx(expected, rel=1e-13)
        assert value.imag == 0.0

    def test_matches_table_entry(self):
        pump = ModeIndex.of(1, 2)
        table = coefficient_table(pump, 0.7, max_order=3)
        signal, idler = ModeIndex.of(2, 1), ModeIndex.of(1, 0)
        direct = thin_crystal_coefficient(pump, signal, idler, 0.7)
        assert direct == pytest.approx(table.entry(signal, idler), abs=1e-15)

    def test_insufficient_rule(self):
        with pytest.raises(QuadratureError) as excinfo:
            thin_crystal_coefficient(
                GAUSSIAN, ModeIndex.of(5, 0), ModeIndex.of(5, 0), 0.5, QuadratureSpec(rule_order=4)
            )
        assert excinfo.value.context["indices"] == ((0, 0), (5, 0), (5, 0))


class TestCoefficientTable:
    """Coefficient tables and selection rules"""

    def test_entry_count(self):
        table = coefficient_table(GAUSSIAN, 0.25, max_order=2)
        assert len(table) == 36
        keys = [key for key, _ in table.rows()]
        assert keys == sorted(keys)

    def test_normalized_low_order_state(self):
        """a = 0.25 truncated at order 1 keeps three terms in ratio 1 : 0.8 : 0.8"""
        table = coefficient_table(GAUSSIAN, 0.25, max_order=1, normalize=True)
        assert table.normalized
        assert table.norm() == pytest.approx(1.0, abs=1e-12)
        dominant = {key: abs(c) for key, c in table.entries.items() if abs(c) > 1e-12}
        assert set(dominant) == {(0, 0, 0, 0), (1, 0, 1, 0), (0, 1, 0, 1)}
        assert dominant[(0, 0, 0, 0)] == pytest.approx(0.66, abs=0.01)
        assert dominant[(1, 0, 1, 0)] == pytest.approx(0.53, abs=0.01)
        assert dominant[(0, 1, 0, 1)] == pytest.approx(0.53, abs=0.01)
        assert dominant[(1, 0, 1, 0)] == pytest.approx(0.8 / math.sqrt(2.28), abs=1e-12)

    def test_off_diagonal_ratio(self):
        table = coefficient_table(GAUSSIAN, 0.25, max_order=2)
        ratio = table.entries[(0, 0, 0, 2)] / table.entries[(0, 0, 0, 0)]
        assert ratio.real == pytest.approx(-0.1414214, abs=1e-7)
        assert ratio.real == pytest.approx(-0.25 / (math.sqrt(2) * 1.25), abs=1e-12)

    def test_symmetric_under_exchange(self):
        """Swapping signal and idler leaves every entry unchanged"""
        table = coefficient_table(ModeIndex.of(1, 0), 0.5, max_order=4)
        for (m_s, n_s, m_i, n_i), value in table.entries.items():
            swapped = table.entries[(m_i, n_i, m_s, n_s)]
            assert abs(value - swapped) <= 1e-14, (m_s, n_s, m_i, n_i)

    def test_parity_law_for_odd_pump(self):
        table = coefficient_table(ModeIndex.of(1, 1), 0.5, max_order=6)
        report = conservation_report(table, ConservationLaw.PARITY)
        assert report.worst_violation < 1e-10
        assert report.violating_count > 0
        assert report.satisfied_weight == pytest.approx(1.0, abs=1e-15)

    def test_quasi_conservation_small_ratio(self):
        table = coefficient_table(GAUSSIAN, 0.01, max_order=4)
        report = conservation_report(table, ConservationLaw.QUASI_CONSERVATION)
        assert report.satisfied_weight > 0.99
        assert report.satisfied_count == 15

    def test_quasi_conservation_weakens_with_ratio(self):
        weights = [
            conservation_report(
                coefficient_table(GAUSSIAN, a, max_order=4), ConservationLaw.QUASI_CONSERVATION
            ).satisfied_weight
            for a in (0.01, 0.1, 1.0)
        ]
        assert weights[0] > weights[1] > weights[2]

    def test_gaussian_pump_factorizes(self):
        table = coefficient_table(GAUSSIAN, 0.25, max_order=4)
        check = gaussian_pump_check(table)
        assert check.max_ratio_deviation < 1e-10
        assert check.entries_checked == len(table)

    def test_factorization_needs_gaussian_pump(self):
        table = coefficient_table(ModeIndex.of(0, 1), 0.25, max_order=1)
        with pytest.raises(InputError):
            gaussian_pump_check(table)

    def test_order_cap(self):
        with pytest.raises(InputError):
            coefficient_table(GAUSSIAN, 0.5, max_order=13)
        with pytest.raises(InputError):
            coefficient_table(GAUSSIAN, 0.5, max_order=3, max_table_order=2)

    def test_rule_too_small_for_table(self):
        with pytest.raises(QuadratureError):
            coefficient_table(GAUSSIAN, 0.5, max_order=4, spec=QuadratureSpec(rule_order=4))
