"""Entanglement purification and swapping maps with gate/readout noise.

Noisy recurrence purification (two-pair CNOT scheme), the Werner-state
swap map, their fidelity fixed points, the initial-stage planner
(s swaps, m purification rounds, mean acceptance), and the per-nesting-
level resource scaling exponent lambda(F_t).

Fidelities are plain floats in [0.25, 1] (Werner-state convention).
The map bodies are rational arithmetic so floats and numpy arrays share
one code path.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

from scipy.optimize import bisect

from satqnet.errors import (
    NoFixedPointError,
    NonconvergenceError,
    ProtocolCollapseError,
    UnreachableTargetError,
    ValidationError,
)

logger = logging.getLogger(__name__)

FIXED_POINT_TOL = 1e-6      # bisection tolerance on F
ROUND_CAP = 64              # purify/swap iterations before nonconvergence
TARGET_EQUAL_TOL = 1e-9     # |F_init - F_t| below this counts as equal

_THIRD = 1.0 / 3.0


@dataclass(frozen=True)
class PlatformParams:
    """Quantum-memory hardware figures of one ground platform.

    Attributes:
        epsilon_g: Two-qubit gate infidelity.
        epsilon_r: Readout error; eta_ro = 1 - epsilon_r.
        t2_s: Memory coherence time (s).
        eta_caps_etad: Combined photon absorption * detection efficiency.
        f_s_hz: Spin-photon interface bandwidth (Hz).
        transition_wavelength_m: Optical transition wavelength (m).
        f_l: Tabulated lower purification fixed point; when None the
            fixed point is computed from the map on demand.
        p_x, p_y, p_z: Pauli error weights conditioned on a gate error;
            must sum to 1. Default is depolarizing (1/3 each).
    """
    epsilon_g: float
    epsilon_r: float
    t2_s: float
    eta_caps_etad: float
    f_s_hz: float
    transition_wavelength_m: float
    f_l: Optional[float] = None
    p_x: float = _THIRD
    p_y: float = _THIRD
    p_z: float = _THIRD

    def __post_init__(self):
        for name in ("epsilon_g", "epsilon_r", "eta_caps_etad",
                     "p_x", "p_y", "p_z"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {value}")
        if abs(self.p_x + self.p_y + self.p_z - 1.0) > 1e-12:
            raise ValidationError(
                f"Pauli weights must sum to 1, got "
                f"{self.p_x + self.p_y + self.p_z}")
        if self.t2_s <= 0.0:
            raise ValidationError(f"T2 must be positive, got {self.t2_s}")
        if self.f_s_hz <= 0.0:
            raise ValidationError(
                f"interface bandwidth must be positive, got {self.f_s_hz}")
        if self.transition_wavelength_m <= 0.0:
            raise ValidationError(
                f"wavelength must be positive, got {self.transition_wavelength_m}")
        if self.f_l is not None and not 0.5 < self.f_l < 1.0:
            raise ValidationError(
                f"lower fixed point must lie in (0.5, 1), got {self.f_l}")

    @property
    def eta_ro(self) -> float:
        """Readout fidelity 1 - epsilon_r."""
        return 1.0 - self.epsilon_r


class PurifyOutcome(NamedTuple):
    """One purification round: output fidelity and acceptance probability."""
    fidelity: float
    acceptance: float


def _purify_raw(f, epsilon_g, eta_ro, p_x, p_y, p_z):
    """Noisy recurrence-purification map; works on floats or arrays.

    Returns (F_out, P_accept). P_accept is (1-eps_g)^2 times the map
    denominator, and F_out * P_accept is (1-eps_g)^2 times the numerator,
    so the two halves reassemble into the published map.
    """
    t = (1.0 - f) * _THIRD
    ro_pair = eta_ro * eta_ro + (1.0 - eta_ro) * (1.0 - eta_ro)
    ro_cross = eta_ro * (1.0 - eta_ro)
    gate = (2.0 * epsilon_g - epsilon_g * epsilon_g) / (1.0 - epsilon_g) ** 2
    numerator = ((f * f + t * t) * ro_pair
                 + (f * t + t * t) * 2.0 * ro_cross
                 + 2.0 * gate * (p_z * f * t + (p_x + p_y) * t * t))
    acceptance = ((f * f + 2.0 * f * t + 5.0 * t * t) * ro_pair
                  + (f * t + t * t) * 8.0 * ro_cross)
    f_out = (1.0 - epsilon_g) ** 2 * numerator / acceptance
    return f_out, acceptance


def _swap_raw(f, eta_s):
    """Werner swap map; works on floats or arrays."""
    k = (4.0 * eta_s * eta_s - 1.0) * _THIRD
    x = (4.0 * f - 1.0) * _THIRD
    return 0.25 * (1.0 + 3.0 * k * x * x)


def purify(f: float, platform: PlatformParams) -> PurifyOutcome:
    """One round of two-pair recurrence purification.

    Args:
        f: Input Werner fidelity in [0.25, 1] (both input pairs).
        platform: Gate/readout noise figures.

    Returns:
        PurifyOutcome(fidelity, acceptance). With ideal gates and
        readout this reduces to the noiseless recurrence map and
        purify(1) = (1, 1).
    """
    if not 0.25 <= f <= 1.0:
        raise ValidationError(f"fidelity must lie in [0.25, 1], got {f}")
    f_out, acceptance = _purify_raw(f, platform.epsilon_g, platform.eta_ro,
                                    platform.p_x, platform.p_y, platform.p_z)
    return PurifyOutcome(f_out, acceptance)


def swap(f: float, eta_s: float) -> float:
    """Fidelity after one entanglement swap (Bell measurement).

    F0 = (1/4)*(1 + 3*((4*eta_s^2-1)/3)*((4F-1)/3)^2); the swap readout
    efficiency eta_s equals the purification readout fidelity.

    Args:
        f: Input Werner fidelity in [0.25, 1].
        eta_s: Effective readout efficiency of the measurement, in [0.5, 1].

    Returns:
        Output fidelity; 0.25 is a fixed floor, F=1 is fixed for eta_s=1.
    """
    if not 0.25 <= f <= 1.0:
        raise ValidationError(f"fidelity must lie in [0.25, 1], got {f}")
    if not 0.5 <= eta_s <= 1.0:
        raise ValidationError(f"eta_s must lie in [0.5, 1], got {eta_s}")
    return _swap_raw(f, eta_s)


def _purify_gain(f: float, platform: PlatformParams) -> float:
    """purify(F) - F, the fixed-point residual."""
    return purify(f, platform).fidelity - f


def _bracketed_root(platform: PlatformParams, lo: float, hi: float) -> float:
    """Bisect purify(F)-F on [lo, hi]; scan for a sign change if needed."""
    g_lo = _purify_gain(lo, platform)
    g_hi = _purify_gain(hi, platform)
    if g_lo * g_hi > 0.0:
        # no sign change at the ends: scan for an interior crossing
        n = 512
        prev_f, prev_g = lo, g_lo
        for i in range(1, n + 1):
            f = lo + (hi - lo) * i / n
            g = _purify_gain(f, platform)
            if prev_g * g <= 0.0:
                lo, hi = prev_f, f
                break
            prev_f, prev_g = f, g
        else:
            raise NoFixedPointError(
                f"purification map has no fixed point in [{lo}, {hi}]")
    return bisect(_purify_gain, lo, hi, args=(platform,), xtol=FIXED_POINT_TOL)


@lru_cache(maxsize=None)
def lower_fixed_point(platform: PlatformParams) -> float:
    """Lower purification fixed point F_l.

    The root of purify(F) - F just above 0.5: purification degrades the
    fidelity below it and improves it above it.

    Args:
        platform: Gate/readout noise figures.

    Returns:
        F_l, found by bracketed bisection on (0.5, 0.75] to 1e-6.

    Raises:
        NoFixedPointError: No sign change in the bracket (noise too large).
    """
    return _bracketed_root(platform, 0.5 + 1e-6, 0.75)


@lru_cache(maxsize=None)
def upper_fixed_point(platform: PlatformParams) -> float:
    """Purification ceiling F_max, the largest fixed point in (F_l, 1].

    Purification from any F in (F_l, F_max) converges upward toward it.
    Ideal gates and readout fix F = 1 exactly.
    """
    if platform.epsilon_g == 0.0 and platform.eta_ro == 1.0:
        return 1.0
    try:
        return _bracketed_root(platform, 0.75, 1.0 - 1e-9)
    except NoFixedPointError:
        if abs(_purify_gain(1.0, platform)) < 1e-12:
            return 1.0
        raise


def platform_f_l(platform: PlatformParams) -> float:
    """Tabulated F_l when present, else the computed fixed point."""
    if platform.f_l is not None:
        return platform.f_l
    return lower_fixed_point(platform)


@dataclass(frozen=True)
class ProtocolPlan:
    """Initial-stage plan plus steady-state scaling for one (F_init, F_t).

    Attributes:
        s: Initial swap levels, including the swap that crosses below F_t.
        m: Initial purification rounds restoring fidelity to >= F_t.
        p_tilde: Multiplicative mean of the m acceptance probabilities.
        k_level: Purification rounds per steady-state nesting level.
        lambda_: Resource scaling exponent log2(2 * prod(2/P_Fi)).
        f_reached: Fidelity after the initial stage (>= F_t on success).
    """
    s: int
    m: int
    p_tilde: float
    k_level: int
    lambda_: float
    f_reached: float

    def __post_init__(self):
        if self.s < 0 or self.m < 0 or self.k_level < 0:
            raise ValidationError("swap/purify counts must be >= 0")
        if not 0.0 < self.p_tilde <= 1.0:
            raise ValidationError(
                f"mean acceptance must lie in (0, 1], got {self.p_tilde}")
        if self.lambda_ < 1.0:
            raise ValidationError(
                f"resource exponent must be >= 1, got {self.lambda_}")
        if not 0.25 <= self.f_reached <= 1.0:
            raise ValidationError(
                f"reached fidelity must lie in [0.25, 1], got {self.f_reached}")


def resource_exponent(acceptances: Sequence[float]) -> float:
    """lambda = log2(2 * prod_i (2/P_i)) for one nesting level.

    One level consumes 2 links for the swap and 2/P_i links per recovery
    purification round, so the per-level multiplier is 2*prod(2/P_i) and
    end-to-end consumption over D hops scales as D^lambda.
    """
    total = 1.0
    for p in acceptances:
        if not 0.0 < p <= 1.0:
            raise ValidationError(f"acceptance must lie in (0, 1], got {p}")
        total += math.log2(2.0 / p)
    return total


def _recovery_rounds(f_start: float, f_t: float,
                     platform: PlatformParams) -> tuple[float, list[float]]:
    """Purify from f_start up to >= f_t.

    Returns:
        (f_final, acceptances) with f_final >= f_t.
    """
    acceptances: list[float] = []
    f = f_start
    while f < f_t:
        if len(acceptances) >= ROUND_CAP:
            raise NonconvergenceError(
                f"purification did not reach {f_t} within {ROUND_CAP} rounds "
                f"(stalled at {f:.6f})")
        f, p = purify(f, platform)
        acceptances.append(p)
    return f, acceptances


@lru_cache(maxsize=None)
def nesting_level_cost(f_t: float, platform: PlatformParams) -> tuple[int, float]:
    """Steady-state per-level recovery cost at target fidelity F_t.

    Args:
        f_t: Target fidelity each nesting level restores.
        platform: Gate/readout noise figures.

    Returns:
        (k_level, lambda): least purification count taking swap(F_t)
        back to >= F_t, and the resource exponent over that path.
        The noiseless boundary (swap keeps F_t) returns (0, 1.0); that
        degenerate exponent is rejected downstream by the hop capacity.

    Raises:
        ProtocolCollapseError: swap(F_t) <= F_l, purification cannot recover.
    """
    f_l = platform_f_l(platform)
    f_swapped = swap(f_t, platform.eta_ro)
    if f_swapped >= f_t:
        logger.warning("degenerate noiseless boundary at F_t = %s: swapping "
                       "costs no fidelity, lambda = 1", f_t)
        return 0, 1.0
    if f_swapped <= f_l:
        raise ProtocolCollapseError(
            f"swap({f_t}) = {f_swapped:.6f} falls to/under the fixed point "
            f"{f_l:.6f}; purification cannot recover")
    _, acceptances = _recovery_rounds(f_swapped, f_t, platform)
    return len(acceptances), resource_exponent(acceptances)


def plan_initial_stage(f_init: float, f_t: float,
                       platform: PlatformParams) -> ProtocolPlan:
    """Plan the initial swaps and purifications from F_init to F_t.

    Below-target inputs are purified straight up (s = 0). Above-target
    inputs are swapped until the fidelity first falls below F_t (that
    crossing swap counts toward s) and then purified back. Equal inputs
    (within 1e-9) need nothing.

    Args:
        f_init: Delivered link fidelity.
        f_t: Target fidelity, above the lower fixed point and below the
            purification ceiling.
        platform: Gate/readout noise figures.

    Returns:
        ProtocolPlan with f_reached >= f_t (success cases).

    Raises:
        UnreachableTargetError: f_t >= F_max, f_t <= F_l, or f_init <= F_l.
        ProtocolCollapseError: Steady state cannot recover after a swap.
        NonconvergenceError: A map iteration exceeded the round cap.
    """
    if not 0.25 <= f_init <= 1.0:
        raise ValidationError(f"fidelity must lie in [0.25, 1], got {f_init}")
    f_l = platform_f_l(platform)
    f_max = upper_fixed_point(platform)
    if f_t >= f_max:
        raise UnreachableTargetError(
            f"target {f_t} is at/above the purification ceiling {f_max:.6f}")
    if f_t <= f_l:
        raise UnreachableTargetError(
            f"target {f_t} is at/under the lower fixed point {f_l:.6f}")
    if f_init <= f_l:
        raise UnreachableTargetError(
            f"initial fidelity {f_init} is at/under the lower fixed "
            f"point {f_l:.6f}")
    k_level, lambda_ = nesting_level_cost(f_t, platform)

    if abs(f_init - f_t) <= TARGET_EQUAL_TOL:
        return ProtocolPlan(s=0, m=0, p_tilde=1.0, k_level=k_level,
                            lambda_=lambda_, f_reached=f_init)

    f = f_init
    s = 0
    if f > f_t:
        while f >= f_t:
            if s >= ROUND_CAP:
                raise NonconvergenceError(
                    f"swapping from {f_init} never crossed below {f_t} "
                    f"within {ROUND_CAP} levels")
            f = swap(f, platform.eta_ro)
            s += 1
    # the crossing swap lands above F_l because swap is increasing in F
    # and swap(f_t) > F_l was already checked by nesting_level_cost
    f, acceptances = _recovery_rounds(f, f_t, platform)
    m = len(acceptances)
    if m == 0:
        p_tilde = 1.0
    else:
        p_tilde = math.exp(math.fsum(math.log(p) for p in acceptances) / m)
    return ProtocolPlan(s=s, m=m, p_tilde=p_tilde, k_level=k_level,
                        lambda_=lambda_, f_reached=f)
