"""Tests for the entangled-pair source statistics.

The closed-form gain and error rate are checked against values frozen from
a 60-digit series summation, against the truncated series directly, and
against their small-signal asymptotics.
"""

import math

import pytest
from hypothesis import given, strategies as st

from satqnet.errors import ValidationError, ZeroGainError
from satqnet.photon_source import (
    ArmPair,
    SourceModel,
    asymptotic_gain,
    asymptotic_qber,
    initial_fidelity,
    n_pair_yield,
    overall_gain,
    pair_number_pmf,
    qber,
)

SRC = SourceModel(mu=0.1, f_hz=1e9, e_d=0.01, e_0=0.5)
ARMS = ArmPair(eta_a=1e-3, eta_b=1e-3, y0a=1e-9, y0b=1e-9)


class TestPairNumberLaw:
    def test_single_pair_probability(self):
        """P(1, 1) = 2*(1/2)/(3/2)^3 = 8/27."""
        assert pair_number_pmf(1.0, 1) == pytest.approx(8.0 / 27.0, rel=1e-15)

    def test_normalization(self):
        total = sum(pair_number_pmf(0.3, n) for n in range(400))
        assert total == pytest.approx(1.0, rel=1e-12)

    def test_mean_pair_number(self):
        mean = sum(n * pair_number_pmf(0.3, n) for n in range(400))
        assert mean == pytest.approx(0.3, rel=1e-12)

    def test_rejects_nonpositive_mu(self):
        with pytest.raises(ValidationError):
            pair_number_pmf(0.0, 1)

    def test_yield_zero_pairs_needs_background(self):
        dark = ArmPair(eta_a=0.5, eta_b=0.5, y0a=0.0, y0b=0.0)
        assert n_pair_yield(0, dark) == 0.0

    def test_yield_saturates_with_pairs(self):
        arms = ArmPair(eta_a=0.3, eta_b=0.3, y0a=0.0, y0b=0.0)
        yields = [n_pair_yield(n, arms) for n in (1, 2, 5, 20)]
        assert yields == sorted(yields)
        assert yields[-1] < 1.0


class TestOverallGain:
    def test_golden_value(self):
        assert overall_gain(SRC, ARMS) == pytest.approx(
            1.1496721368951193e-07, rel=1e-12)

    def test_matches_direct_series(self):
        """Term-by-term sum over the pair-number law, no closed form."""
        total = 0.0
        for n in range(2000):
            total += pair_number_pmf(SRC.mu, n) * n_pair_yield(n, ARMS)
        assert overall_gain(SRC, ARMS) == pytest.approx(total, rel=1e-9)

    def test_perfect_arms_saturate(self):
        perfect = ArmPair(eta_a=1.0, eta_b=1.0, y0a=0.0, y0b=0.0)
        gain = overall_gain(SourceModel(mu=0.2, f_hz=1e9, e_d=0.01, e_0=0.5),
                            perfect)
        lost = pair_number_pmf(0.2, 0)
        assert gain == pytest.approx(1.0 - lost, rel=1e-12)

    @given(st.floats(min_value=1e-4, max_value=0.5),
           st.floats(min_value=1e-6, max_value=1.0))
    def test_gain_within_unit_interval(self, mu, eta):
        src = SourceModel(mu=mu, f_hz=1e9, e_d=0.01, e_0=0.5)
        gain = overall_gain(src, ArmPair.symmetric(eta, 1e-9))
        assert 0.0 < gain <= 1.0


class TestQber:
    def test_golden_value(self):
        assert qber(SRC, ARMS) == pytest.approx(0.052570577857459166,
                                                rel=1e-12)

    def test_dark_arms_give_no_gain(self):
        dead = ArmPair(eta_a=0.0, eta_b=0.0, y0a=0.0, y0b=0.0)
        with pytest.raises(ZeroGainError):
            qber(SRC, dead)

    def test_background_free_error_floor(self):
        """With strong arms the error rate approaches the detector floor."""
        strong = ArmPair(eta_a=1.0, eta_b=1.0, y0a=0.0, y0b=0.0)
        src = SourceModel(mu=1e-3, f_hz=1e9, e_d=0.01, e_0=0.5)
        assert qber(src, strong) == pytest.approx(0.01, abs=2e-3)

    def test_background_dominated_error_is_random(self):
        noisy = ArmPair(eta_a=1e-9, eta_b=1e-9, y0a=1e-2, y0b=1e-2)
        src = SourceModel(mu=2e-4, f_hz=1e9, e_d=0.01, e_0=0.5)
        assert qber(src, noisy) == pytest.approx(0.5, abs=1e-3)

    def test_initial_fidelity_mapping(self):
        assert initial_fidelity(0.0) == 1.0
        assert initial_fidelity(0.02) == pytest.approx(0.97, rel=1e-15)
        assert initial_fidelity(0.5) == 0.25


class TestAsymptotics:
    def test_gain_leading_order(self):
        """Q -> eta_a*eta_b*mu*(1 + 3*mu/2) for weak arms, no background."""
        exact = overall_gain(SourceModel(mu=0.05, f_hz=1e9, e_d=0.01,
                                         e_0=0.5),
                             ArmPair.symmetric(0.01, 0.0))
        assert exact == pytest.approx(5.367151479625681e-06, rel=1e-12)
        approx = asymptotic_gain(0.05, 0.01, 0.01)
        assert exact == pytest.approx(approx, rel=2e-3)

    def test_qber_leading_order(self):
        exact = qber(SourceModel(mu=0.05, f_hz=1e9, e_d=0.01, e_0=0.5),
                     ArmPair.symmetric(0.01, 0.0))
        approx = asymptotic_qber(0.05, 0.01)
        assert exact == pytest.approx(approx, rel=1e-2)

    def test_asymptotic_qber_closed_form(self):
        assert asymptotic_qber(0.05, 0.01) == pytest.approx(
            (0.01 + 0.025 * 1.01) / 1.075, rel=1e-15)


class TestSourceValidation:
    def test_rejects_mu_above_cap(self):
        with pytest.raises(ValidationError):
            SourceModel(mu=0.6, f_hz=1e9, e_d=0.01, e_0=0.5)

    def test_rejects_negative_dark_error(self):
        with pytest.raises(ValidationError):
            SourceModel(mu=0.1, f_hz=1e9, e_d=-0.01, e_0=0.5)

    def test_rejects_arm_outside_unit_interval(self):
        with pytest.raises(ValidationError):
            ArmPair(eta_a=1.5, eta_b=0.5, y0a=0.0, y0b=0.0)
