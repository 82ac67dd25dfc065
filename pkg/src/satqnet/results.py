"""Serialization of performance records to CSV rows and JSON documents.

All curve-style output shares one versioned, flat row schema so that sweep,
tradeoff, grid, and optimum files can be concatenated and post-processed with
the same tooling.  Single optima and validation reports are also available as
JSON documents carrying the same schema version.

Formatting rules are chosen for byte-level determinism: floats are rendered
with ``repr`` (shortest round-trip form), rows end with a bare newline, and
JSON keys are sorted.  Non-finite values are never emitted; infeasible points
encode as a zero rate plus a machine-readable reason code.
"""

import csv
import json
import logging
import math
from typing import IO, Iterable, Optional, Sequence

from .errors import REASON_NO_FEASIBLE_POINT, ValidationError
from .optimizer import Optimum, TradeoffPoint
from .performance_model import PerformancePoint

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

CSV_COLUMNS = (
    "schema_version",
    "scenario",
    "platform",
    "L_km",
    "altitude_km",
    "mu",
    "L0_km",
    "L0_over_L",
    "F_t",
    "F_init",
    "s",
    "m",
    "P_tilde",
    "k_level",
    "lambda",
    "F_reached",
    "R0_Hz",
    "T",
    "D_star",
    "L_star_km",
    "R_Hz",
    "feasible",
    "reason",
)


def _fmt_float(value: float) -> str:
    """Render a float in shortest round-trip form, rejecting non-finite values."""
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"non-finite value in result row: {value}")
    return repr(value)


def point_row(point: PerformancePoint, scenario: str, platform: str) -> list:
    """Flatten one evaluated point into an ordered list of CSV cell strings.

    Lengths are converted from metres to kilometres at this boundary.  Points
    without a protocol plan (rejected before planning) carry zeros in the plan
    columns; every planned point has ``lambda`` >= 1, so the zero is
    unambiguous.

    Args:
        point: Evaluated performance point, feasible or not.
        scenario: Scenario label for the row.
        platform: Platform label for the row.

    Returns:
        List of strings, one per column in ``CSV_COLUMNS``.
    """
    plan = point.plan
    return [
        str(SCHEMA_VERSION),
        scenario,
        platform,
        _fmt_float(point.l_m / 1e3),
        _fmt_float(point.h_m / 1e3),
        _fmt_float(point.mu),
        _fmt_float(point.l0_m / 1e3),
        _fmt_float(point.l0_m / point.l_m if point.l_m > 0.0 else 0.0),
        _fmt_float(point.f_t),
        _fmt_float(point.f_init),
        str(plan.s if plan is not None else 0),
        str(plan.m if plan is not None else 0),
        _fmt_float(plan.p_tilde if plan is not None else 0.0),
        str(plan.k_level if plan is not None else 0),
        _fmt_float(plan.lambda_ if plan is not None else 0.0),
        _fmt_float(plan.f_reached if plan is not None else 0.0),
        _fmt_float(point.r0_hz),
        _fmt_float(point.t_overhead),
        _fmt_float(point.d_star),
        _fmt_float(point.l_star_m / 1e3),
        _fmt_float(point.r_hz),
        "true" if point.feasible else "false",
        point.reason,
    ]


def most_common_failure(failure_counts: dict) -> str:
    """Pick the dominant failure reason, breaking ties alphabetically."""
    if not failure_counts:
        return REASON_NO_FEASIBLE_POINT
    ranked = sorted(failure_counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[0][0]


def _placeholder_row(
    l_m: float, scenario: str, platform: str, reason: str, f_t: float = 0.0
) -> list:
    """Build an all-zero row marking a gap in a curve."""
    zero = _fmt_float(0.0)
    return [
        str(SCHEMA_VERSION),
        scenario,
        platform,
        _fmt_float(l_m / 1e3),
        zero,  # altitude_km
        zero,  # mu
        zero,  # L0_km
        zero,  # L0_over_L
        _fmt_float(f_t),
        zero,  # F_init
        "0",  # s
        "0",  # m
        zero,  # P_tilde
        "0",  # k_level
        zero,  # lambda
        zero,  # F_reached
        zero,  # R0_Hz
        zero,  # T
        zero,  # D_star
        zero,  # L_star_km
        zero,  # R_Hz
        "false",
        reason,
    ]


def optimum_row(optimum: Optimum) -> list:
    """Serialize one optimization result as a single CSV row.

    An empty optimum (no feasible grid point) produces a placeholder row whose
    reason column holds the most frequent failure code seen on the grid.
    """
    if optimum.best is not None:
        return point_row(optimum.best, optimum.scenario, optimum.platform_name)
    return _placeholder_row(
        optimum.l_m,
        optimum.scenario,
        optimum.platform_name,
        most_common_failure(optimum.failure_counts),
    )


def sweep_rows(optima: Sequence[Optimum]) -> list:
    """Serialize a rate-versus-distance sweep, one row per end-to-end distance."""
    return [optimum_row(opt) for opt in optima]


def tradeoff_rows(
    points: Sequence[TradeoffPoint], l_m: float, scenario: str, platform: str
) -> list:
    """Serialize a rate-versus-target-fidelity curve, one row per target.

    Infeasible targets appear as gap rows with the target fidelity filled in,
    so the curve's domain stays visible in the output.
    """
    rows = []
    for entry in points:
        if entry.best is not None:
            rows.append(point_row(entry.best, scenario, platform))
        else:
            rows.append(
                _placeholder_row(
                    l_m, scenario, platform, REASON_NO_FEASIBLE_POINT, f_t=entry.f_t
                )
            )
    return rows


def grid_rows(optimum: Optimum) -> list:
    """Serialize every evaluated grid point of an optimization run."""
    return [
        point_row(point, optimum.scenario, optimum.platform_name)
        for point in optimum.grid_points
    ]


def write_csv(stream: IO, rows: Iterable) -> None:
    """Write the versioned header followed by the given rows.

    Args:
        stream: Text stream opened with ``newline=""`` when it is a file.
        rows: Iterable of cell-string lists matching ``CSV_COLUMNS``.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    count = 0
    for row in rows:
        if len(row) != len(CSV_COLUMNS):
            raise ValidationError(
                f"row has {len(row)} cells, schema has {len(CSV_COLUMNS)}"
            )
        writer.writerow(row)
        count += 1
    logger.debug("wrote %d rows", count)


def _point_fields(point: Optional[PerformancePoint], scenario: str, platform: str) -> Optional[dict]:
    """Map one point onto schema column names with native JSON types."""
    if point is None:
        return None
    row = point_row(point, scenario, platform)
    fields = {}
    for name, cell in zip(CSV_COLUMNS, row):
        if name in ("scenario", "platform", "reason"):
            fields[name] = cell
        elif name == "feasible":
            fields[name] = cell == "true"
        elif name in ("schema_version", "s", "m", "k_level"):
            fields[name] = int(cell)
        else:
            fields[name] = float(cell)
    del fields["schema_version"]
    return fields


def point_document(point: PerformancePoint, scenario: str, platform: str) -> dict:
    """Build the JSON document for a single evaluated point."""
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "point",
        "point": _point_fields(point, scenario, platform),
    }


def optimum_document(optimum: Optimum) -> dict:
    """Build the JSON document for one optimization result.

    The document always reports grid accounting (points evaluated, points
    feasible, per-reason failure counts) so that an empty optimum still
    explains itself.
    """
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "optimum",
        "scenario": optimum.scenario,
        "platform": optimum.platform_name,
        "L_km": optimum.l_m / 1e3,
        "n_evaluated": optimum.n_evaluated,
        "n_feasible": optimum.n_feasible,
        "failure_counts": dict(sorted(optimum.failure_counts.items())),
        "optimum": _point_fields(optimum.best, optimum.scenario, optimum.platform_name),
    }


def validation_document(results: Sequence) -> dict:
    """Build the JSON report for a list of oracle check results.

    Args:
        results: Sequence of objects with name, passed, value, reference,
            residual, tolerance, and detail attributes.
    """
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "validation-report",
        "passed": all(r.passed for r in results),
        "n_checks": len(results),
        "n_failed": sum(1 for r in results if not r.passed),
        "checks": [
            {
                "name": r.name,
                "passed": r.passed,
                "value": r.value,
                "reference": r.reference,
                "residual": r.residual,
                "tolerance": r.tolerance,
                "detail": r.detail,
            }
            for r in results
        ],
    }


def write_json(stream: IO, document: dict) -> None:
    """Write a JSON document with sorted keys and a trailing newline."""
    json.dump(document, stream, indent=2, sort_keys=True)
    stream.write("\n")
