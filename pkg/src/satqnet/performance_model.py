"""End-to-end repeater-chain performance for one operating point.

Combines the optical channel, the photon-pair source statistics and the
initial-stage protocol plan into the elementary link rate R0, the
resource overhead T, the memory-limited hop capacity D* and the
end-to-end entanglement rate R = R0 / T.

Lengths are metres throughout; rates are Hz.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

from satqnet.errors import (
    REASON_INSUFFICIENT_HOPS,
    REASON_INSUFFICIENT_REACH,
    BelowHorizonError,
    DegenerateLambdaError,
    InfeasibleFidelityError,
    InfeasibleGeometryError,
    NonconvergenceError,
    ProtocolCollapseError,
    UnreachableTargetError,
    ValidationError,
    ZeroGainError,
)
from satqnet.link_budget import (
    EARTH_RADIUS_M,
    LinkGeometry,
    OpticalChain,
    max_ground_distance,
)
from satqnet.photon_source import (
    ArmPair,
    SourceModel,
    initial_fidelity,
    overall_gain,
    qber,
)
from satqnet.repeater_protocol import (
    PlatformParams,
    ProtocolPlan,
    plan_initial_stage,
    platform_f_l,
)

logger = logging.getLogger(__name__)

DEGENERATE_LAMBDA_TOL = 1e-6    # lambda below 1 + this cannot enter D*
MIN_ELEVATION_RAD = math.radians(15.0)

# error classes that mark an operating point infeasible instead of
# aborting a sweep; everything else (bad arguments, broken config)
# propagates to the caller
INFEASIBILITY_ERRORS = (
    BelowHorizonError,
    DegenerateLambdaError,
    InfeasibleFidelityError,
    InfeasibleGeometryError,
    NonconvergenceError,
    ProtocolCollapseError,
    UnreachableTargetError,
    ZeroGainError,
)


@dataclass(frozen=True)
class GroundSegment:
    """Receiver-side multiplexing and memory-absorption factors.

    Attributes:
        n_m: Number of multiplexed photon modes.
        beta: Interface-to-source bandwidth ratio min(1, f_s / f).
        eta_caps_etad: Combined memory absorption * detection efficiency.
        eta_demux: Demultiplexing efficiency (enters the rate squared).
    """
    n_m: int
    beta: float
    eta_caps_etad: float
    eta_demux: float

    def __post_init__(self):
        if not isinstance(self.n_m, int) or self.n_m < 1:
            raise ValidationError(
                f"mode count must be an integer >= 1, got {self.n_m}")
        if not 0.0 < self.beta <= 1.0:
            raise ValidationError(
                f"bandwidth ratio must lie in (0, 1], got {self.beta}")
        for name in ("eta_caps_etad", "eta_demux"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValidationError(
                    f"{name} must lie in (0, 1], got {value}")


@dataclass(frozen=True)
class NetworkModel:
    """Everything fixed for one scenario/platform/altitude combination.

    The three decision variables (mu, L0, F_t) stay free; evaluate_point
    binds them. Labels are carried through to result records only.
    """
    chain: OpticalChain
    ground: GroundSegment
    platform: PlatformParams
    f_hz: float
    e_d: float
    e_0: float
    h_m: float
    r_e_m: float = EARTH_RADIUS_M
    phi_min_rad: float = MIN_ELEVATION_RAD
    scenario: str = ""
    platform_name: str = ""

    def __post_init__(self):
        if self.f_hz <= 0.0:
            raise ValidationError(
                f"source rate must be positive, got {self.f_hz}")
        if self.h_m <= 0.0:
            raise ValidationError(f"altitude must be positive, got {self.h_m}")

    def geometry(self, l0_m: float) -> LinkGeometry:
        """Link geometry for one ground-station spacing."""
        return LinkGeometry(h_m=self.h_m, l0_m=l0_m, r_e_m=self.r_e_m,
                            phi_min_rad=self.phi_min_rad)

    def reach_m(self) -> float:
        """Largest serviceable ground-station spacing at this altitude."""
        return max_ground_distance(self.h_m, self.phi_min_rad, self.r_e_m)


@dataclass(frozen=True)
class PerformancePoint:
    """Full evaluation record of one (mu, L0, F_t) operating point.

    Infeasible points carry r_hz = 0 and a machine-readable reason;
    fields not reached before the failure stay at their zero defaults.
    """
    mu: float
    l0_m: float
    f_t: float
    l_m: float
    h_m: float
    f_init: float = 0.0
    r0_hz: float = 0.0
    plan: Optional[ProtocolPlan] = None
    t_overhead: float = 0.0
    d_star: float = 0.0
    l_star_m: float = 0.0
    r_hz: float = 0.0
    feasible: bool = False
    reason: str = ""

    def __post_init__(self):
        if self.feasible and self.reason:
            raise ValidationError(
                f"feasible point must not carry a reason, got {self.reason!r}")
        if self.feasible and self.plan is None:
            raise ValidationError("feasible point must carry a protocol plan")
        if not self.feasible and self.r_hz != 0.0:
            raise ValidationError(
                f"infeasible point must carry zero rate, got {self.r_hz}")


def elementary_rate(src: SourceModel, ground: GroundSegment,
                    q_mu: float) -> float:
    """Entanglement generation rate between adjacent ground stations.

    R0 = N_m * f * beta * eta_CAPS*eta_d * eta_demux^2 * Q_mu, linear in
    every factor.

    Args:
        src: Photon-pair source (supplies the emission rate f).
        ground: Multiplexing and absorption factors.
        q_mu: Overall coincidence gain of the two-arm link.

    Returns:
        Elementary rate in Hz.
    """
    if not 0.0 <= q_mu <= 1.0:
        raise ValidationError(f"gain must lie in [0, 1], got {q_mu}")
    return (ground.n_m * src.f_hz * ground.beta * ground.eta_caps_etad
            * ground.eta_demux ** 2 * q_mu)


def resource_overhead(plan: ProtocolPlan, l_m: float, l0_m: float) -> float:
    """Elementary-link consumption factor T of the nested protocol.

    T = (2 / P~)^m * max(2^-s * L / L0, 1)^(lambda - 1). The clamp keeps
    the hop-count base physical when the initial swaps already cover
    more than the end-to-end distance.

    Args:
        plan: Initial-stage plan (s, m, P~, lambda).
        l_m: End-to-end distance (m).
        l0_m: Ground-station spacing (m), at most l_m.

    Returns:
        Overhead T >= 1, so R = R0 / T never exceeds R0.
    """
    if not 0.0 < l0_m <= l_m:
        raise ValidationError(
            f"need 0 < L0 <= L, got L0 = {l0_m}, L = {l_m}")
    base = max(2.0 ** -plan.s * (l_m / l0_m), 1.0)
    return (2.0 / plan.p_tilde) ** plan.m * base ** (plan.lambda_ - 1.0)


def coherence_margin(f_l: float, eta_ro: float, f_t: float) -> float:
    """sqrt(-log(...)) factor converting the fidelity gap into hop budget.

    The argument (3 * sqrt((4 F_l - 1) / (4 eta_ro^2 - 1)) + 1) / (4 F_t)
    measures how close the target sits to the purification floor; it must
    stay below 1 for the memory to buy any hops at all.

    Raises:
        InfeasibleFidelityError: Argument >= 1 (target too low relative
            to the fixed point and readout).
    """
    denom = 4.0 * eta_ro * eta_ro - 1.0
    if denom <= 0.0:
        raise ValidationError(f"eta_ro must exceed 0.5, got {eta_ro}")
    arg = (3.0 * math.sqrt((4.0 * f_l - 1.0) / denom) + 1.0) / (4.0 * f_t)
    if arg >= 1.0:
        raise InfeasibleFidelityError(
            f"hop-capacity log argument is {arg:.6f} >= 1 at F_t = {f_t}; "
            f"the target fidelity is too low for F_l = {f_l:.6f}")
    return math.sqrt(-math.log(arg))


def max_hops(r0_hz: float, plan: ProtocolPlan, platform: PlatformParams,
             f_t: float) -> float:
    """Memory-limited hop capacity D* of the repeater chain.

    D* = 2^s * ((2/P~)^-m * R0 * T2 * coherence_margin)^(1 / (lambda - 1)),
    kept real-valued; feasibility tests compare it against 1 and L / L0.

    Args:
        r0_hz: Elementary rate (Hz).
        plan: Initial-stage plan supplying s, m, P~ and lambda.
        platform: Supplies T2, the readout fidelity and the fixed point.
        f_t: Target fidelity.

    Returns:
        Dimensionless hop capacity, increasing in R0 and T2.

    Raises:
        DegenerateLambdaError: lambda <= 1 + 1e-6 (noiseless boundary).
        InfeasibleFidelityError: See coherence_margin.
    """
    if plan.lambda_ <= 1.0 + DEGENERATE_LAMBDA_TOL:
        raise DegenerateLambdaError(
            f"resource exponent {plan.lambda_} is too close to 1 for the "
            f"hop-capacity exponent 1 / (lambda - 1)")
    if r0_hz <= 0.0:
        raise ZeroGainError(f"elementary rate must be positive, got {r0_hz}")
    margin = coherence_margin(platform_f_l(platform), platform.eta_ro, f_t)
    bracket = ((2.0 / plan.p_tilde) ** -plan.m * r0_hz * platform.t2_s
               * margin)
    return 2.0 ** plan.s * bracket ** (1.0 / (plan.lambda_ - 1.0))


def network_reach(d_star: float, l0_m: float) -> float:
    """End-to-end distance D* * L0 the chain can span, in metres."""
    if d_star < 0.0:
        raise ValidationError(f"hop capacity must be >= 0, got {d_star}")
    return d_star * l0_m


def end_to_end_rate(r0_hz: float, t_overhead: float) -> float:
    """End-to-end entanglement rate R = R0 / T, in Hz."""
    if t_overhead < 1.0:
        raise ValidationError(
            f"overhead must be >= 1, got {t_overhead}")
    return r0_hz / t_overhead


def evaluate_point(model: NetworkModel, mu: float, l0_m: float, f_t: float,
                   l_m: float) -> PerformancePoint:
    """Evaluate one (mu, L0, F_t) operating point end to end.

    Runs the channel, source, planner, hop-capacity and overhead stages
    in order. Stage failures that merely mark the point non-operational
    (geometry out of reach, unreachable target, protocol collapse, ...)
    are folded into an infeasible record so that grid sweeps always
    complete; argument errors propagate.

    Args:
        model: Fixed scenario/platform/altitude bundle.
        mu: Mean photon-pair number per pulse.
        l0_m: Ground-station spacing (m).
        f_t: Target fidelity.
        l_m: End-to-end distance (m).

    Returns:
        PerformancePoint; feasible iff D* >= 1 and D* * L0 >= L and
        every stage succeeded.
    """
    partial = PerformancePoint(mu=mu, l0_m=l0_m, f_t=f_t, l_m=l_m,
                               h_m=model.h_m)
    try:
        geom = model.geometry(l0_m)
        eta = model.chain.channel_efficiency(geom)
        y0 = model.chain.background_click()
        src = SourceModel(mu=mu, f_hz=model.f_hz, e_d=model.e_d, e_0=model.e_0)
        arms = ArmPair.symmetric(eta, y0)
        q_mu = overall_gain(src, arms)
        partial = replace(partial, f_init=initial_fidelity(qber(src, arms)))
        partial = replace(partial,
                          r0_hz=elementary_rate(src, model.ground, q_mu))
        plan = plan_initial_stage(partial.f_init, f_t, model.platform)
        partial = replace(partial, plan=plan)
        d_star = max_hops(partial.r0_hz, plan, model.platform, f_t)
        partial = replace(partial, d_star=d_star,
                          l_star_m=network_reach(d_star, l0_m),
                          t_overhead=resource_overhead(plan, l_m, l0_m))
    except INFEASIBILITY_ERRORS as exc:
        logger.debug("point (mu=%g, L0=%g m, F_t=%g) infeasible: %s",
                     mu, l0_m, f_t, exc)
        return replace(partial, reason=exc.reason)
    if partial.d_star < 1.0:
        return replace(partial, reason=REASON_INSUFFICIENT_HOPS)
    if partial.l_star_m < l_m:
        return replace(partial, reason=REASON_INSUFFICIENT_REACH)
    return replace(partial, feasible=True,
                   r_hz=end_to_end_rate(partial.r0_hz, partial.t_overhead))
