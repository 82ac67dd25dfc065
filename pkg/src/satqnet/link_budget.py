"""Geometric and optical budget of the satellite-to-ground channel.

Slant range and coverage geometry, obscured-aperture antenna gain with
pointing jitter, diffraction loss, Beer-Lambert atmospheric loss, coupling
budget, sky-background click probability, and the composite channel
efficiency eta(L0).

All lengths in metres, angles in radians, times in seconds. km/nm/urad
appear only at the configuration boundary.
"""
import logging
import math
from dataclasses import dataclass

from satqnet.errors import (
    BelowHorizonError,
    InfeasibleGeometryError,
    ValidationError,
)

logger = logging.getLogger(__name__)

EARTH_RADIUS_M = 6378.0e3      # equatorial value used by every built-in scenario
PLANCK_HC_JM = 1.9864e-25      # h*c (J*m); photon energy E_p = hc/lambda

# The aperture taper polynomial is a fit, quoted accurate to +-1% only
# for obscuration ratios up to this bound; larger ratios are rejected.
MAX_OBSCURATION_GAMMA = 0.4


def max_ground_distance(h_m: float, phi_min_rad: float,
                        r_e_m: float = EARTH_RADIUS_M) -> float:
    """Longest ground span a satellite can bridge at minimum elevation.

    2*R_E*[arccos(R_E*cos(phi_min)/(R_E+h)) - phi_min]: both ground
    stations see the satellite exactly at elevation phi_min.

    Args:
        h_m: Satellite altitude (m).
        phi_min_rad: Minimum usable elevation angle (rad), in [0, pi/2).
        r_e_m: Earth radius (m).

    Returns:
        Maximum ground-station separation (m).

    Raises:
        InfeasibleGeometryError: If the bracketed term is <= 0.
    """
    if h_m <= 0.0:
        raise ValidationError(f"altitude must be positive, got {h_m}")
    if not 0.0 <= phi_min_rad < math.pi / 2.0:
        raise ValidationError(
            f"minimum elevation must lie in [0, pi/2), got {phi_min_rad}")
    bracket = math.acos(r_e_m * math.cos(phi_min_rad) / (r_e_m + h_m)) - phi_min_rad
    if bracket <= 0.0:
        raise InfeasibleGeometryError(
            f"no coverage: elevation {phi_min_rad} rad too large for "
            f"altitude {h_m} m")
    return 2.0 * r_e_m * bracket


@dataclass(frozen=True)
class LinkGeometry:
    """Satellite-above-midpoint geometry of one ground-station pair.

    Attributes:
        h_m: Satellite altitude (m).
        l0_m: Ground-station separation (m).
        r_e_m: Earth radius (m).
        phi_min_rad: Minimum usable elevation (rad).
    """
    h_m: float
    l0_m: float
    r_e_m: float = EARTH_RADIUS_M
    phi_min_rad: float = math.radians(15.0)

    def __post_init__(self):
        if self.h_m <= 0.0:
            raise ValidationError(f"altitude must be positive, got {self.h_m}")
        if not 0.0 <= self.phi_min_rad < math.pi / 2.0:
            raise ValidationError(
                f"minimum elevation must lie in [0, pi/2), got {self.phi_min_rad}")
        if self.l0_m < 0.0:
            raise ValidationError(f"L0 must be >= 0, got {self.l0_m}")
        reach = max_ground_distance(self.h_m, self.phi_min_rad, self.r_e_m)
        if self.l0_m > reach:
            raise InfeasibleGeometryError(
                f"L0 = {self.l0_m / 1e3:.1f} km exceeds the "
                f"{reach / 1e3:.1f} km coverage limit at h = "
                f"{self.h_m / 1e3:.0f} km")


def slant_distance(geom: LinkGeometry) -> float:
    """Minimum slant range from the satellite to either ground station.

    Law-of-cosines range to a station half the ground arc away,
    rearranged as sqrt(h^2 + 4*R*(R+h)*sin^2(L0/(4*R))) so that L0=0
    returns h exactly instead of through a catastrophic cancellation.

    Args:
        geom: Link geometry.

    Returns:
        Slant distance (m); always >= h.
    """
    half_arc = geom.l0_m / (2.0 * geom.r_e_m)
    s = math.sin(half_arc / 2.0)
    return math.sqrt(geom.h_m * geom.h_m
                     + 4.0 * geom.r_e_m * (geom.r_e_m + geom.h_m) * s * s)


def zenith_cosine(geom: LinkGeometry) -> float:
    """cos(theta) of the slant path at the ground station.

    cos(theta) = h/d - (d^2 - h^2)/(2*R_E*d); equals 1 exactly at L0=0.
    """
    d = slant_distance(geom)
    return (geom.h_m / d
            - (d * d - geom.h_m * geom.h_m) / (2.0 * geom.r_e_m * d))


@dataclass(frozen=True)
class OpticalTerminal:
    """One telescope of the free-space link.

    Attributes:
        diameter_m: Aperture diameter (m).
        obscuration_gamma: Central obscuration ratio; the taper fit is
            only valid up to 0.4 and larger values are rejected.
        wavelength_m: Operating wavelength (m).
        pointing_sigma_rad: Pointing jitter std. dev. (rad); enters the
            corrected gain through its square, so the sign is irrelevant.
            Meaningful for the transmitter only.
    """
    diameter_m: float
    obscuration_gamma: float
    wavelength_m: float
    pointing_sigma_rad: float = 0.0

    def __post_init__(self):
        if self.diameter_m <= 0.0:
            raise ValidationError(f"diameter must be positive, got {self.diameter_m}")
        if self.wavelength_m <= 0.0:
            raise ValidationError(
                f"wavelength must be positive, got {self.wavelength_m}")
        if not 0.0 <= self.obscuration_gamma <= MAX_OBSCURATION_GAMMA:
            raise ValidationError(
                f"obscuration ratio must lie in [0, {MAX_OBSCURATION_GAMMA}], "
                f"got {self.obscuration_gamma}")


def taper_alpha(gamma: float) -> float:
    """Gaussian-taper coefficient for an obscured circular aperture.

    Quartic fit 1.12 - 1.30*gamma^2 + 2.12*gamma^4, valid for gamma <= 0.4.
    """
    if not 0.0 <= gamma <= MAX_OBSCURATION_GAMMA:
        raise ValidationError(
            f"obscuration ratio must lie in [0, {MAX_OBSCURATION_GAMMA}], "
            f"got {gamma}")
    g2 = gamma * gamma
    return 1.12 - 1.30 * g2 + 2.12 * g2 * g2


def _gain_exponentials(term: OpticalTerminal) -> tuple[float, float]:
    """(e^{-a^2} - e^{-a^2 g^2})^2 aperture factor pieces.

    Returns:
        (single, double): e^{-a^2 g^2} - e^{-a^2} and its
        double-exponent analogue e^{-2 a^2 g^2} - e^{-2 a^2}.
    """
    a2 = taper_alpha(term.obscuration_gamma) ** 2
    g2 = term.obscuration_gamma ** 2
    single = math.exp(-a2 * g2) - math.exp(-a2)
    double = math.exp(-2.0 * a2 * g2) - math.exp(-2.0 * a2)
    return single, double


def peak_gain(term: OpticalTerminal) -> float:
    """On-axis antenna gain of a Gaussian-illuminated obscured aperture.

    G = (pi*D/lambda)^2 * (2/alpha^2) * (e^{-alpha^2} - e^{-alpha^2*gamma^2})^2.
    Always below the uniform-illumination ceiling (pi*D/lambda)^2.

    Args:
        term: Telescope parameters.

    Returns:
        Dimensionless power gain.
    """
    a2 = taper_alpha(term.obscuration_gamma) ** 2
    single, _ = _gain_exponentials(term)
    ceiling = (math.pi * term.diameter_m / term.wavelength_m) ** 2
    return ceiling * (2.0 / a2) * single * single


def half_beamwidth(term: OpticalTerminal) -> float:
    """Half beamwidth angle theta_HBW = sqrt(8/directivity) (rad)."""
    _, double = _gain_exponentials(term)
    directivity = peak_gain(term) / double
    return math.sqrt(8.0 / directivity)


def fov_solid_angle(term: OpticalTerminal) -> float:
    """Receiver field of view (sr) for single-mode coupling.

    The diffraction-limited acceptance cone is widened by sqrt(2):
    Omega = pi*(sqrt(2)*theta_HBW)^2/4 = pi*theta_HBW^2/2.
    """
    theta = half_beamwidth(term)
    return math.pi * theta * theta / 2.0


def corrected_tx_gain(term: OpticalTerminal) -> float:
    """Transmitter gain averaged over Gaussian pointing jitter.

    8*(e^{-2*alpha^2*gamma^2} - e^{-2*alpha^2}) / (theta_HBW^2 + 4*sigma^2).
    At sigma=0 this reduces to the on-axis peak gain; it decays
    quadratically once sigma exceeds the half beamwidth.

    Args:
        term: Transmitter telescope parameters (pointing_sigma_rad used).

    Returns:
        Dimensionless effective gain.
    """
    _, double = _gain_exponentials(term)
    theta = half_beamwidth(term)
    sigma = term.pointing_sigma_rad
    return 8.0 * double / (theta * theta + 4.0 * sigma * sigma)


def diffraction_bpe_efficiency(term_tx: OpticalTerminal, d_rx_m: float,
                               d_min_m: float) -> float:
    """Diffraction plus beam-pointing-error transmittance.

    eta = G_tx,corrected * D_rx^2 / (16 * d^2): the far-field fraction of
    the jitter-broadened beam collected by the receiver aperture.

    Args:
        term_tx: Transmitter telescope.
        d_rx_m: Receiver aperture diameter (m).
        d_min_m: Slant distance (m), > 0.

    Returns:
        Transmittance in (0, 1]; clamped to 1 (with a logged diagnostic)
        if the far-field formula exceeds unity at unphysically short range.
    """
    if d_min_m <= 0.0:
        raise ValidationError(f"slant distance must be positive, got {d_min_m}")
    eta = corrected_tx_gain(term_tx) * d_rx_m * d_rx_m / (16.0 * d_min_m * d_min_m)
    if eta > 1.0:
        logger.warning(
            "diffraction efficiency %.3g > 1 at d = %.3g m clamped to 1; "
            "the far-field formula does not hold this close", eta, d_min_m)
        return 1.0
    return eta


@dataclass(frozen=True)
class AtmosphereAndCoupling:
    """Atmospheric zenith transmittance and ground-segment coupling budget.

    Attributes:
        eta_zenith: One-pass atmospheric transmittance at zenith.
        eta_optics: Receiver telescope and optics throughput.
        eta_det: Detection efficiency.
        eta_fc: Free-space-to-fiber coupling efficiency.
    """
    eta_zenith: float
    eta_optics: float = 1.0
    eta_det: float = 1.0
    eta_fc: float = 1.0

    def __post_init__(self):
        for name in ("eta_zenith", "eta_optics", "eta_det", "eta_fc"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValidationError(f"{name} must lie in (0, 1], got {value}")


def atmospheric_efficiency(eta_zenith: float, geom: LinkGeometry) -> float:
    """Beer-Lambert slant transmittance eta_zenith^sec(theta).

    Args:
        eta_zenith: Zenith transmittance in (0, 1].
        geom: Link geometry (sets the zenith angle via the slant path).

    Returns:
        Transmittance; equals eta_zenith exactly at zenith (L0 = 0).

    Raises:
        BelowHorizonError: If the path geometry gives cos(theta) <= 0.
    """
    if not 0.0 < eta_zenith <= 1.0:
        raise ValidationError(f"eta_zenith must lie in (0, 1], got {eta_zenith}")
    cos_theta = zenith_cosine(geom)
    if cos_theta <= 0.0:
        raise BelowHorizonError(
            f"slant path below horizon: cos(theta) = {cos_theta:.3g}")
    return eta_zenith ** (1.0 / cos_theta)


def coupling_efficiency(ac: AtmosphereAndCoupling) -> float:
    """Composite ground coupling eta_optics * eta_det * eta_fc."""
    return ac.eta_optics * ac.eta_det * ac.eta_fc


@dataclass(frozen=True)
class BackgroundEnvironment:
    """Sky background and filtering around the receiver.

    Attributes:
        h_sky_w_m3_sr: Sky spectral radiance (W * m^-2 * sr^-1 * m^-1).
        delta_lambda_m: Spectral filter bandwidth (m).
        delta_t_s: Coincidence time window (s).
        planck_hc_jm: h*c (J*m) for the photon energy.
    """
    h_sky_w_m3_sr: float
    delta_lambda_m: float
    delta_t_s: float
    planck_hc_jm: float = PLANCK_HC_JM

    def __post_init__(self):
        for name in ("h_sky_w_m3_sr", "delta_lambda_m", "delta_t_s",
                     "planck_hc_jm"):
            if getattr(self, name) <= 0.0:
                raise ValidationError(
                    f"{name} must be strictly positive, got {getattr(self, name)}")


def background_mean_photons(env: BackgroundEnvironment,
                            receiver: OpticalTerminal) -> float:
    """Mean sky-background photon number per coincidence window.

    n_bar = H_sky * Omega_FOV * A_R * (1 - gamma^2) * dlambda * dT / E_p
    with collection area A_R = pi*(D/2)^2 reduced by the central
    obscuration and photon energy E_p = hc/lambda.

    Args:
        env: Sky radiance, filter bandwidth, coincidence window.
        receiver: Receiver telescope (sets the field of view and area).

    Returns:
        Expected background photons per pulse window (dimensionless).
    """
    omega = fov_solid_angle(receiver)
    area = math.pi * (receiver.diameter_m / 2.0) ** 2
    clear_fraction = 1.0 - receiver.obscuration_gamma ** 2
    photon_energy = env.planck_hc_jm / receiver.wavelength_m
    return (env.h_sky_w_m3_sr * omega * area * clear_fraction
            * env.delta_lambda_m * env.delta_t_s / photon_energy)


def background_click_probability(n_bar: float) -> float:
    """Probability of at least one background photon: Y0 = 1 - e^{-n_bar}."""
    if n_bar < 0.0:
        raise ValidationError(f"mean photon number must be >= 0, got {n_bar}")
    return -math.expm1(-n_bar)


def total_channel_efficiency(geom: LinkGeometry, term_tx: OpticalTerminal,
                             term_rx: OpticalTerminal,
                             ac: AtmosphereAndCoupling) -> float:
    """Composite one-arm channel efficiency eta(L0).

    Product of the diffraction/pointing, atmospheric, and coupling
    transmittances at the slant distance set by L0; monotone
    non-increasing in L0.
    """
    d = slant_distance(geom)
    return (diffraction_bpe_efficiency(term_tx, term_rx.diameter_m, d)
            * atmospheric_efficiency(ac.eta_zenith, geom)
            * coupling_efficiency(ac))


@dataclass(frozen=True)
class OpticalChain:
    """Full optical path of one downlink arm.

    Attributes:
        transmitter: Satellite telescope (holds the pointing jitter).
        receiver: Ground telescope (holds the field of view).
        atmosphere: Zenith transmittance and coupling budget.
        background: Sky radiance and filtering environment.
    """
    transmitter: OpticalTerminal
    receiver: OpticalTerminal
    atmosphere: AtmosphereAndCoupling
    background: BackgroundEnvironment

    def __post_init__(self):
        if self.transmitter.wavelength_m != self.receiver.wavelength_m:
            raise ValidationError(
                "transmitter and receiver must share one wavelength, got "
                f"{self.transmitter.wavelength_m} and {self.receiver.wavelength_m}")

    def channel_efficiency(self, geom: LinkGeometry) -> float:
        """eta(L0) through this chain for the given geometry."""
        return total_channel_efficiency(geom, self.transmitter, self.receiver,
                                        self.atmosphere)

    def background_mean(self) -> float:
        """Mean background photons per window at this receiver."""
        return background_mean_photons(self.background, self.receiver)

    def background_click(self) -> float:
        """Background click probability Y0 at this receiver."""
        return background_click_probability(self.background_mean())
