"""Tests for the free-space optical downlink budget.

Golden values are frozen from a 60-digit arithmetic evaluation of the same
formulas; relative tolerances of 1e-12 allow only float rounding drift.
"""

import math

import pytest
from hypothesis import given, strategies as st

from satqnet.errors import InfeasibleGeometryError, ValidationError
from satqnet.link_budget import (
    AtmosphereAndCoupling,
    BackgroundEnvironment,
    LinkGeometry,
    OpticalChain,
    OpticalTerminal,
    atmospheric_efficiency,
    background_click_probability,
    background_mean_photons,
    corrected_tx_gain,
    coupling_efficiency,
    diffraction_bpe_efficiency,
    fov_solid_angle,
    half_beamwidth,
    max_ground_distance,
    peak_gain,
    slant_distance,
    taper_alpha,
    total_channel_efficiency,
    zenith_cosine,
)

RECEIVER = OpticalTerminal(diameter_m=1.0, obscuration_gamma=0.2,
                           wavelength_m=780e-9)
TRANSMITTER_A = OpticalTerminal(diameter_m=0.2, obscuration_gamma=0.2,
                                wavelength_m=780e-9, pointing_sigma_rad=2e-6)


class TestGeometry:
    def test_slant_at_zero_separation_is_altitude(self):
        geom = LinkGeometry(h_m=500e3, l0_m=0.0)
        assert slant_distance(geom) == 500e3

    def test_slant_golden(self):
        """d(h=500 km, L0=1000 km) from the law-of-cosines midpoint form."""
        geom = LinkGeometry(h_m=500e3, l0_m=1000e3)
        assert slant_distance(geom) == pytest.approx(720736.1347764166,
                                                     rel=1e-12)

    def test_zenith_cosine_at_zero_separation(self):
        geom = LinkGeometry(h_m=500e3, l0_m=0.0)
        assert zenith_cosine(geom) == 1.0

    def test_zenith_cosine_golden(self):
        geom = LinkGeometry(h_m=500e3, l0_m=2000e3)
        assert zenith_cosine(geom) == pytest.approx(0.36091711745633226,
                                                    rel=1e-12)

    def test_coverage_limit_table(self):
        """Maximum ground separation at a 15 degree minimum elevation."""
        expected = {
            500e3: 2538157.368495792,
            1000e3: 4092802.001915914,
            1500e3: 5244152.811990816,
            2000e3: 6158970.938442019,
        }
        for h_m, l_max in expected.items():
            reach = max_ground_distance(h_m, math.radians(15.0))
            assert reach == pytest.approx(l_max, rel=1e-12)

    def test_separation_beyond_coverage_rejected(self):
        with pytest.raises(InfeasibleGeometryError):
            LinkGeometry(h_m=500e3, l0_m=2600e3)

    def test_negative_separation_rejected(self):
        with pytest.raises(ValidationError):
            LinkGeometry(h_m=500e3, l0_m=-1.0)

    @given(st.floats(min_value=400e3, max_value=2000e3),
           st.floats(min_value=0.0, max_value=2500e3))
    def test_slant_never_below_altitude(self, h_m, l0_m):
        geom = LinkGeometry(h_m=h_m, l0_m=min(
            l0_m, max_ground_distance(h_m, math.radians(15.0))))
        assert slant_distance(geom) >= h_m


class TestTaperAndGain:
    def test_taper_alpha_golden(self):
        assert taper_alpha(0.2) == pytest.approx(1.0713920000000001,
                                                 rel=1e-15)

    def test_taper_alpha_unobscured(self):
        assert taper_alpha(0.0) == 1.12

    def test_taper_alpha_rejects_large_obscuration(self):
        with pytest.raises(ValidationError):
            taper_alpha(0.5)

    def test_peak_gain_golden(self):
        assert peak_gain(RECEIVER) == pytest.approx(11498267774696.582,
                                                    rel=1e-12)

    def test_peak_gain_below_uniform_ceiling(self):
        ceiling = (math.pi * RECEIVER.diameter_m / RECEIVER.wavelength_m) ** 2
        assert peak_gain(RECEIVER) < ceiling

    def test_half_beamwidth_golden(self):
        assert half_beamwidth(RECEIVER) == pytest.approx(
            7.514379868239527e-07, rel=1e-12)

    def test_fov_solid_angle_golden(self):
        assert fov_solid_angle(RECEIVER) == pytest.approx(
            8.869643585559316e-13, rel=1e-12)

    def test_corrected_gain_golden(self):
        """Jitter-broadened transmitter gain for the 20 cm terminal."""
        assert corrected_tx_gain(TRANSMITTER_A) == pytest.approx(
            215583021481.31226, rel=1e-12)

    def test_corrected_gain_without_jitter_is_peak(self):
        still = OpticalTerminal(diameter_m=0.2, obscuration_gamma=0.2,
                                wavelength_m=780e-9, pointing_sigma_rad=0.0)
        assert corrected_tx_gain(still) == pytest.approx(peak_gain(still),
                                                         rel=1e-12)

    def test_corrected_gain_decreases_with_jitter(self):
        sigmas = [0.0, 1e-6, 2e-6, 4e-6]
        gains = [
            corrected_tx_gain(OpticalTerminal(
                diameter_m=0.2, obscuration_gamma=0.2, wavelength_m=780e-9,
                pointing_sigma_rad=s))
            for s in sigmas
        ]
        assert gains == sorted(gains, reverse=True)


class TestDiffractionEfficiency:
    def test_golden_at_zenith(self):
        eta = diffraction_bpe_efficiency(TRANSMITTER_A, 1.0, 500e3)
        assert eta == pytest.approx(0.05389575537032806, rel=1e-12)

    def test_clamped_to_unity_at_short_range(self):
        assert diffraction_bpe_efficiency(TRANSMITTER_A, 1.0, 1.0) == 1.0

    def test_rejects_nonpositive_range(self):
        with pytest.raises(ValidationError):
            diffraction_bpe_efficiency(TRANSMITTER_A, 1.0, 0.0)

    def test_inverse_square_in_range(self):
        near = diffraction_bpe_efficiency(TRANSMITTER_A, 1.0, 600e3)
        far = diffraction_bpe_efficiency(TRANSMITTER_A, 1.0, 1200e3)
        assert near / far == pytest.approx(4.0, rel=1e-12)


class TestAtmosphere:
    def test_zenith_transmittance_is_exact(self):
        geom = LinkGeometry(h_m=500e3, l0_m=0.0)
        assert atmospheric_efficiency(0.8, geom) == 0.8

    def test_slant_transmittance_golden(self):
        geom = LinkGeometry(h_m=500e3, l0_m=2000e3)
        assert atmospheric_efficiency(0.8, geom) == pytest.approx(
            0.5388768946128348, rel=1e-12)

    def test_transmittance_falls_with_separation(self):
        etas = [
            atmospheric_efficiency(0.8, LinkGeometry(h_m=500e3, l0_m=l0))
            for l0 in (0.0, 500e3, 1000e3, 2000e3)
        ]
        assert etas == sorted(etas, reverse=True)

    def test_rejects_invalid_zenith_transmittance(self):
        geom = LinkGeometry(h_m=500e3, l0_m=0.0)
        with pytest.raises(ValidationError):
            atmospheric_efficiency(0.0, geom)

    def test_coupling_budget_product(self):
        ac = AtmosphereAndCoupling(eta_zenith=0.8, eta_optics=0.1,
                                   eta_det=0.8, eta_fc=0.25)
        assert coupling_efficiency(ac) == pytest.approx(0.02, rel=1e-12)


class TestBackground:
    ENV = BackgroundEnvironment(h_sky_w_m3_sr=1.5e3, delta_lambda_m=1e-9,
                                delta_t_s=1e-9)

    def test_mean_photon_number_golden(self):
        n_bar = background_mean_photons(self.ENV, RECEIVER)
        assert n_bar == pytest.approx(3.939004149034191e-09, rel=1e-12)

    def test_click_probability_from_mean(self):
        n_bar = 3.939004149034191e-09
        assert background_click_probability(n_bar) == pytest.approx(
            -math.expm1(-n_bar), rel=1e-15)

    def test_click_probability_zero_background(self):
        assert background_click_probability(0.0) == 0.0

    def test_click_probability_rejects_negative(self):
        with pytest.raises(ValidationError):
            background_click_probability(-1e-9)


class TestChannel:
    AC = AtmosphereAndCoupling(eta_zenith=0.8, eta_optics=0.1, eta_det=0.8,
                               eta_fc=0.25)

    def test_total_efficiency_golden(self):
        """Composite arm transmittance for the 20 cm / 1 m pair at 1000 km."""
        geom = LinkGeometry(h_m=500e3, l0_m=1000e3)
        eta = total_channel_efficiency(geom, TRANSMITTER_A, RECEIVER, self.AC)
        assert eta == pytest.approx(0.00037078035916246347, rel=1e-12)

    def test_total_efficiency_monotone_in_separation(self):
        etas = [
            total_channel_efficiency(LinkGeometry(h_m=500e3, l0_m=l0),
                                     TRANSMITTER_A, RECEIVER, self.AC)
            for l0 in (0.0, 400e3, 800e3, 1600e3, 2400e3)
        ]
        assert etas == sorted(etas, reverse=True)

    def test_chain_composition_matches_pieces(self):
        env = BackgroundEnvironment(h_sky_w_m3_sr=1.5e3, delta_lambda_m=1e-9,
                                    delta_t_s=1e-9)
        chain = OpticalChain(transmitter=TRANSMITTER_A, receiver=RECEIVER,
                             atmosphere=self.AC, background=env)
        geom = LinkGeometry(h_m=500e3, l0_m=1000e3)
        assert chain.channel_efficiency(geom) == total_channel_efficiency(
            geom, TRANSMITTER_A, RECEIVER, self.AC)
        assert chain.background_click() == background_click_probability(
            background_mean_photons(env, RECEIVER))

    def test_chain_rejects_wavelength_mismatch(self):
        other = OpticalTerminal(diameter_m=1.0, obscuration_gamma=0.2,
                                wavelength_m=738e-9)
        env = BackgroundEnvironment(h_sky_w_m3_sr=1.5e3, delta_lambda_m=1e-9,
                                    delta_t_s=1e-9)
        with pytest.raises(ValidationError):
            OpticalChain(transmitter=TRANSMITTER_A, receiver=other,
                         atmosphere=self.AC, background=env)
