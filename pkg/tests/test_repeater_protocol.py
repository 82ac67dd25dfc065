"""Tests for the purification and swapping protocol maps.

Map outputs and fixed points are checked against 60-digit evaluations of
the same rational expressions; bisected fixed points carry the solver's
1e-6 bracket tolerance instead of float precision.
"""

import math

import pytest
from hypothesis import given, strategies as st

from satqnet.errors import (
    NoFixedPointError,
    ProtocolCollapseError,
    UnreachableTargetError,
    ValidationError,
)
from satqnet.repeater_protocol import (
    PlatformParams,
    ProtocolPlan,
    lower_fixed_point,
    nesting_level_cost,
    plan_initial_stage,
    platform_f_l,
    purify,
    resource_exponent,
    swap,
    upper_fixed_point,
)

SIV = PlatformParams(epsilon_g=5e-4, epsilon_r=1e-4, t2_s=2.1,
                     eta_caps_etad=0.4, f_s_hz=1e9,
                     transition_wavelength_m=738e-9)
NV = PlatformParams(epsilon_g=3.5e-4, epsilon_r=4e-4, t2_s=75.0,
                    eta_caps_etad=0.1, f_s_hz=1e8,
                    transition_wavelength_m=638e-9)
ATOMS = PlatformParams(epsilon_g=2.5e-3, epsilon_r=4e-3, t2_s=42.0,
                       eta_caps_etad=0.675, f_s_hz=3.34e8,
                       transition_wavelength_m=780e-9)
IDEAL = PlatformParams(epsilon_g=0.0, epsilon_r=0.0, t2_s=1.0,
                       eta_caps_etad=1.0, f_s_hz=1e9,
                       transition_wavelength_m=780e-9)

# Bisection bracket tolerance of the fixed-point solver.
BISECT_TOL = 2e-6


class TestPurify:
    def test_ideal_platform_rational_value(self):
        """Noiseless recurrence at F = 0.7: 25/34 fidelity, 0.68 acceptance."""
        out = purify(0.7, IDEAL)
        assert out.fidelity == pytest.approx(25.0 / 34.0, rel=1e-15)
        assert out.acceptance == pytest.approx(0.68, rel=1e-15)

    def test_ideal_platform_keeps_perfection(self):
        out = purify(1.0, IDEAL)
        assert out.fidelity == 1.0
        assert out.acceptance == 1.0

    def test_siv_golden(self):
        out = purify(0.9, SIV)
        assert out.fidelity == pytest.approx(0.9254750978574499, rel=1e-12)
        assert out.acceptance == pytest.approx(0.8754053483555555, rel=1e-12)

    def test_atoms_golden(self):
        out = purify(0.85, ATOMS)
        assert out.fidelity == pytest.approx(0.8788146547694593, rel=1e-12)
        assert out.acceptance == pytest.approx(0.81490048, rel=1e-12)

    def test_gains_above_lower_fixed_point(self):
        f_l = lower_fixed_point(SIV)
        for f in (f_l + 0.01, 0.7, 0.9, 0.99):
            assert purify(f, SIV).fidelity > f

    def test_degrades_below_lower_fixed_point(self):
        f_l = lower_fixed_point(SIV)
        assert purify(f_l - 0.01, SIV).fidelity < f_l - 0.01

    def test_rejects_fidelity_outside_range(self):
        with pytest.raises(ValidationError):
            purify(0.2, SIV)

    @given(st.floats(min_value=0.26, max_value=0.999))
    def test_outputs_stay_physical(self, f):
        out = purify(f, SIV)
        assert 0.25 <= out.fidelity <= 1.0
        assert 0.0 < out.acceptance <= 1.0


class TestSwap:
    def test_perfect_inputs(self):
        assert swap(1.0, 1.0) == 1.0

    def test_white_noise_is_invariant(self):
        assert swap(0.25, 0.9) == 0.25

    def test_siv_golden(self):
        assert swap(0.95, 1.0 - 1e-4) == pytest.approx(0.9031591198222222,
                                                       rel=1e-12)

    def test_atoms_golden(self):
        assert swap(0.9, 1.0 - 4e-3) == pytest.approx(0.8073364622222222,
                                                      rel=1e-12)

    def test_always_degrades_interior_fidelity(self):
        for f in (0.5, 0.75, 0.9, 0.99):
            assert swap(f, 0.9999) < f

    def test_rejects_low_readout(self):
        with pytest.raises(ValidationError):
            swap(0.9, 0.4)


class TestFixedPoints:
    def test_lower_fixed_points_against_oracle(self):
        oracle = {"siv": (SIV, 0.5018779865363779),
                  "nv": (NV, 0.5019767919428265),
                  "atoms": (ATOMS, 0.5170264986796781)}
        for platform, expected in oracle.values():
            assert lower_fixed_point(platform) == pytest.approx(
                expected, abs=BISECT_TOL)

    def test_upper_fixed_points_against_oracle(self):
        oracle = {"siv": (SIV, 0.9969888401346249),
                  "nv": (NV, 0.9978903450784987),
                  "atoms": (ATOMS, 0.9843650286667818)}
        for platform, expected in oracle.values():
            assert upper_fixed_point(platform) == pytest.approx(
                expected, abs=BISECT_TOL)

    def test_ideal_ceiling_is_unity(self):
        assert upper_fixed_point(IDEAL) == 1.0

    def test_ideal_lower_bracket_has_no_root(self):
        with pytest.raises(NoFixedPointError):
            lower_fixed_point(IDEAL)

    def test_fixed_points_are_stationary(self):
        for platform in (SIV, NV, ATOMS):
            f_l = lower_fixed_point(platform)
            assert purify(f_l, platform).fidelity == pytest.approx(
                f_l, abs=BISECT_TOL)

    def test_tabulated_value_takes_precedence(self):
        tabulated = PlatformParams(epsilon_g=5e-4, epsilon_r=1e-4, t2_s=2.1,
                                   eta_caps_etad=0.4, f_s_hz=1e9,
                                   transition_wavelength_m=738e-9,
                                   f_l=0.5017)
        assert platform_f_l(tabulated) == 0.5017
        assert platform_f_l(SIV) == lower_fixed_point(SIV)


class TestResourceExponent:
    def test_certain_acceptance_counts_links_only(self):
        """P = 1 rounds cost a factor 2 each: lambda = 1 + k."""
        assert resource_exponent([]) == 1.0
        assert resource_exponent([1.0]) == 2.0
        assert resource_exponent([1.0, 1.0, 1.0]) == 4.0

    def test_half_acceptance_costs_two_doublings(self):
        assert resource_exponent([0.5]) == 3.0

    def test_rejects_zero_acceptance(self):
        with pytest.raises(ValidationError):
            resource_exponent([0.0])


class TestNestingLevelCost:
    def test_siv_golden(self):
        k_level, lambda_ = nesting_level_cost(0.95, SIV)
        assert k_level == 3
        assert lambda_ == pytest.approx(4.425613013885009, rel=1e-12)

    def test_white_noise_boundary_is_free(self):
        """swap(0.25) = 0.25 never loses fidelity, so recovery is free."""
        k_level, lambda_ = nesting_level_cost(0.25, SIV)
        assert (k_level, lambda_) == (0, 1.0)

    def test_collapse_when_swap_falls_to_fixed_point(self):
        with pytest.raises(ProtocolCollapseError):
            nesting_level_cost(0.52, ATOMS)

    def test_recovery_always_needs_rounds_in_working_band(self):
        """Each recovery round costs at least one doubling (2/P >= 2), so
        lambda >= 1 + k, strictly above when any acceptance is below 1."""
        for f_t in (0.95, 0.96, 0.97, 0.98, 0.99):
            k_level, lambda_ = nesting_level_cost(f_t, SIV)
            assert k_level >= 1
            assert lambda_ > 1.0 + k_level


class TestPlanInitialStage:
    def test_below_target_purifies_straight_up(self):
        plan = plan_initial_stage(0.9, 0.95, SIV)
        assert plan.s == 0
        assert plan.m >= 1
        assert plan.f_reached >= 0.95

    def test_above_target_swaps_through_crossing(self):
        """The swap that first drops below F_t is included in s."""
        plan = plan_initial_stage(0.9777749963883561, 0.95, SIV)
        assert plan.s == 2
        assert plan.m == 2
        assert plan.p_tilde == pytest.approx(0.9057005774935196, rel=1e-10)
        assert plan.f_reached == pytest.approx(0.9543126888457661, rel=1e-10)

    def test_equal_input_needs_nothing(self):
        plan = plan_initial_stage(0.95, 0.95 + 1e-12, SIV)
        assert (plan.s, plan.m, plan.p_tilde) == (0, 0, 1.0)
        assert plan.f_reached == 0.95

    def test_one_swap_then_recovery(self):
        f_init = 0.96
        plan = plan_initial_stage(f_init, 0.95, SIV)
        assert plan.s == 1
        assert plan.f_reached >= 0.95

    def test_target_above_ceiling_unreachable(self):
        with pytest.raises(UnreachableTargetError):
            plan_initial_stage(0.9, 0.998, SIV)

    def test_start_below_fixed_point_unreachable(self):
        with pytest.raises(UnreachableTargetError):
            plan_initial_stage(0.4, 0.95, SIV)

    def test_target_below_fixed_point_unreachable(self):
        with pytest.raises(UnreachableTargetError):
            plan_initial_stage(0.9, 0.4, SIV)

    def test_plan_mean_acceptance_in_range(self):
        plan = plan_initial_stage(0.9, 0.96, ATOMS)
        assert 0.0 < plan.p_tilde <= 1.0
        assert plan.k_level >= 1
        assert plan.lambda_ > 1.0


class TestProtocolPlanInvariants:
    def test_rejects_negative_counts(self):
        with pytest.raises(ValidationError):
            ProtocolPlan(s=-1, m=0, p_tilde=1.0, k_level=0, lambda_=1.0,
                         f_reached=0.95)

    def test_rejects_exponent_below_one(self):
        with pytest.raises(ValidationError):
            ProtocolPlan(s=0, m=0, p_tilde=1.0, k_level=0, lambda_=0.5,
                         f_reached=0.95)


class TestPlatformParams:
    def test_readout_fidelity_complement(self):
        assert SIV.eta_ro == pytest.approx(0.9999, rel=1e-15)

    def test_rejects_unnormalized_pauli_weights(self):
        with pytest.raises(ValidationError):
            PlatformParams(epsilon_g=1e-3, epsilon_r=1e-3, t2_s=1.0,
                           eta_caps_etad=0.5, f_s_hz=1e9,
                           transition_wavelength_m=780e-9,
                           p_x=0.5, p_y=0.5, p_z=0.5)

    def test_rejects_tabulated_fixed_point_outside_range(self):
        with pytest.raises(ValidationError):
            PlatformParams(epsilon_g=1e-3, epsilon_r=1e-3, t2_s=1.0,
                           eta_caps_etad=0.5, f_s_hz=1e9,
                           transition_wavelength_m=780e-9, f_l=0.4)
