"""Satellite-assisted quantum repeater network performance model.

End-to-end entanglement rates and fidelities for chains of optical ground
stations linked by entangled-photon downlinks from satellites, from the
free-space link budget through pair-source statistics, purification and
swapping, to the jointly optimized (mu, L0, F_t) operating point.

The usual entry points are :func:`load_config` and
:func:`build_network_models` to set up a scenario, :func:`evaluate_point`
for one operating point, and :func:`optimize_rate`,
:func:`optimize_over_altitudes`, :func:`sweep_distance`, and
:func:`rate_fidelity_tradeoff` for searches and curves.
"""

from .config import (
    PLATFORM_PRESETS,
    SCENARIO_PRESETS,
    PlatformConfig,
    ScenarioConfig,
    build_network_model,
    build_network_models,
    load_config,
    platform_preset,
    scenario_preset,
    write_config,
)
from .errors import (
    BelowHorizonError,
    ConfigParseError,
    DegenerateLambdaError,
    InfeasibleFidelityError,
    InfeasibleGeometryError,
    NoFixedPointError,
    NonconvergenceError,
    ProtocolCollapseError,
    SatqnetError,
    UnreachableTargetError,
    ValidationError,
    ZeroGainError,
)
from .link_budget import (
    AtmosphereAndCoupling,
    BackgroundEnvironment,
    LinkGeometry,
    OpticalChain,
    OpticalTerminal,
)
from .optimizer import (
    GridSpec,
    Optimum,
    SearchSpace,
    TradeoffPoint,
    build_search_space,
    optimize_over_altitudes,
    optimize_rate,
    rate_fidelity_tradeoff,
    sweep_distance,
)
from .performance_model import (
    GroundSegment,
    NetworkModel,
    PerformancePoint,
    evaluate_point,
)
from .photon_source import ArmPair, SourceModel
from .repeater_protocol import (
    PlatformParams,
    ProtocolPlan,
    lower_fixed_point,
    plan_initial_stage,
    purify,
    swap,
    upper_fixed_point,
)

__version__ = "0.1.0"

__all__ = [
    "ArmPair",
    "AtmosphereAndCoupling",
    "BackgroundEnvironment",
    "BelowHorizonError",
    "ConfigParseError",
    "DegenerateLambdaError",
    "GridSpec",
    "GroundSegment",
    "InfeasibleFidelityError",
    "InfeasibleGeometryError",
    "LinkGeometry",
    "NetworkModel",
    "NoFixedPointError",
    "NonconvergenceError",
    "OpticalChain",
    "OpticalTerminal",
    "Optimum",
    "PLATFORM_PRESETS",
    "PerformancePoint",
    "PlatformConfig",
    "PlatformParams",
    "ProtocolCollapseError",
    "ProtocolPlan",
    "SCENARIO_PRESETS",
    "SatqnetError",
    "ScenarioConfig",
    "SearchSpace",
    "SourceModel",
    "TradeoffPoint",
    "UnreachableTargetError",
    "ValidationError",
    "ZeroGainError",
    "build_network_model",
    "build_network_models",
    "build_search_space",
    "evaluate_point",
    "load_config",
    "lower_fixed_point",
    "optimize_over_altitudes",
    "optimize_rate",
    "plan_initial_stage",
    "platform_preset",
    "purify",
    "rate_fidelity_tradeoff",
    "scenario_preset",
    "swap",
    "sweep_distance",
    "upper_fixed_point",
    "write_config",
]
