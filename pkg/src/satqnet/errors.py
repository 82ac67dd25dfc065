"""Error types and machine-readable reason codes.

Every failure mode that can turn a grid point infeasible carries a stable
reason code string; sweep output encodes infeasible points as R=0 plus that
code instead of raising, so full grids are always produced.
"""


class SatqnetError(Exception):
    """Base class for all package errors.

    Attributes:
        reason: Stable machine-readable reason code.
    """

    reason = "error"


class ValidationError(SatqnetError, ValueError):
    """A parameter or configuration value violates an invariant."""

    reason = "validation-error"


class ConfigParseError(SatqnetError, ValueError):
    """A configuration file failed to parse."""

    reason = "parse-error"


class InfeasibleGeometryError(SatqnetError):
    """Requested geometry cannot be realised (e.g. L0 beyond coverage)."""

    reason = "infeasible-geometry"


class BelowHorizonError(SatqnetError):
    """Slant path dips below the local horizon (cos(theta) <= 0)."""

    reason = "below-horizon"


class ZeroGainError(SatqnetError):
    """Coincidence gain is zero; QBER is undefined."""

    reason = "zero-gain"


class NoFixedPointError(SatqnetError):
    """The purification map has no fixed point in the search bracket."""

    reason = "no-fixed-point"


class UnreachableTargetError(SatqnetError):
    """Target fidelity cannot be reached from the initial fidelity."""

    reason = "unreachable-target"


class NonconvergenceError(SatqnetError):
    """Iterated protocol maps failed to reach the target within the cap."""

    reason = "nonconvergence"


class ProtocolCollapseError(SatqnetError):
    """A swap drops the fidelity below the purification fixed point."""

    reason = "protocol-collapse"


class InfeasibleFidelityError(SatqnetError):
    """Hop-capacity log argument is >= 1 (target too low for the memory)."""

    reason = "infeasible-fidelity"


class DegenerateLambdaError(SatqnetError):
    """Resource exponent is at the degenerate noiseless boundary (~1)."""

    reason = "degenerate-lambda"


# Constraint failures that are data, not exceptions.
REASON_INSUFFICIENT_HOPS = "insufficient-hops"
REASON_INSUFFICIENT_REACH = "insufficient-reach"

# Placeholder reason for curve gaps where no grid point was feasible.
REASON_NO_FEASIBLE_POINT = "no-feasible-point"
