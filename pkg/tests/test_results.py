"""Tests for CSV row and JSON document serialization."""

import io
import json
import math

import pytest

from satqnet.errors import REASON_NO_FEASIBLE_POINT, ValidationError
from satqnet.optimizer import Optimum, TradeoffPoint
from satqnet.performance_model import PerformancePoint
from satqnet.repeater_protocol import ProtocolPlan
from satqnet.results import (
    CSV_COLUMNS,
    SCHEMA_VERSION,
    most_common_failure,
    optimum_document,
    optimum_row,
    point_document,
    point_row,
    sweep_rows,
    tradeoff_rows,
    validation_document,
    write_csv,
    write_json,
)
from satqnet.validation import CheckResult


def feasible_point() -> PerformancePoint:
    plan = ProtocolPlan(s=2, m=2, p_tilde=0.9057005774935196, k_level=3,
                        lambda_=4.425613013885009,
                        f_reached=0.9543126888457661)
    return PerformancePoint(
        mu=0.01, l0_m=1200e3, f_t=0.95, l_m=6000e3, h_m=500e3,
        f_init=0.9777749963883561, r0_hz=280.65881913369594, plan=plan,
        t_overhead=10.472898722765784, d_star=13.778634789658282,
        l_star_m=16534361.747589938, r_hz=26.79858046594161, feasible=True)


def infeasible_point() -> PerformancePoint:
    return PerformancePoint(mu=0.01, l0_m=1200e3, f_t=0.999, l_m=6000e3,
                            h_m=500e3, f_init=0.9777749963883561,
                            r0_hz=280.65881913369594,
                            reason="unreachable-target")


class TestPointRow:
    def test_matches_schema_width_and_order(self):
        row = point_row(feasible_point(), "B", "siv")
        assert len(row) == len(CSV_COLUMNS)
        assert row[0] == str(SCHEMA_VERSION)
        assert row[1] == "B"
        assert row[2] == "siv"
        assert row[-2] == "true"
        assert row[-1] == ""

    def test_lengths_emitted_in_km(self):
        row = point_row(feasible_point(), "B", "siv")
        cells = dict(zip(CSV_COLUMNS, row))
        assert cells["L_km"] == "6000.0"
        assert cells["L0_km"] == "1200.0"
        assert cells["altitude_km"] == "500.0"
        assert cells["L0_over_L"] == "0.2"
        assert cells["L_star_km"] == repr(16534361.747589938 / 1e3)

    def test_floats_round_trip_exactly(self):
        point = feasible_point()
        row = point_row(point, "B", "siv")
        cells = dict(zip(CSV_COLUMNS, row))
        assert float(cells["R_Hz"]) == point.r_hz
        assert float(cells["P_tilde"]) == point.plan.p_tilde
        assert float(cells["lambda"]) == point.plan.lambda_

    def test_unplanned_point_zeros_plan_columns(self):
        point = PerformancePoint(mu=0.01, l0_m=1200e3, f_t=0.95, l_m=6000e3,
                                 h_m=500e3, reason="zero-gain")
        cells = dict(zip(CSV_COLUMNS, point_row(point, "B", "siv")))
        assert cells["s"] == "0"
        assert cells["m"] == "0"
        assert cells["P_tilde"] == "0.0"
        assert cells["k_level"] == "0"
        assert cells["lambda"] == "0.0"
        assert cells["feasible"] == "false"
        assert cells["reason"] == "zero-gain"

    def test_non_finite_value_rejected(self):
        point = PerformancePoint(mu=0.01, l0_m=1200e3, f_t=0.95, l_m=6000e3,
                                 h_m=500e3, f_init=math.nan,
                                 reason="zero-gain")
        with pytest.raises(ValidationError, match="non-finite"):
            point_row(point, "B", "siv")


class TestFailureRanking:
    def test_highest_count_wins(self):
        counts = {"insufficient-reach": 3, "insufficient-hops": 9}
        assert most_common_failure(counts) == "insufficient-hops"

    def test_ties_break_alphabetically(self):
        counts = {"insufficient-reach": 4, "insufficient-hops": 4}
        assert most_common_failure(counts) == "insufficient-hops"

    def test_empty_tally_gets_generic_code(self):
        assert most_common_failure({}) == REASON_NO_FEASIBLE_POINT


class TestCurveRows:
    def test_empty_optimum_produces_placeholder(self):
        optimum = Optimum(l_m=12000e3, scenario="A", platform_name="nv",
                          best=None, n_evaluated=100, n_feasible=0,
                          failure_counts={"insufficient-hops": 100})
        cells = dict(zip(CSV_COLUMNS, optimum_row(optimum)))
        assert cells["L_km"] == "12000.0"
        assert cells["R_Hz"] == "0.0"
        assert cells["feasible"] == "false"
        assert cells["reason"] == "insufficient-hops"

    def test_sweep_rows_align_with_optima(self):
        optima = [
            Optimum(l_m=2000e3, scenario="B", platform_name="siv",
                    best=feasible_point(), n_evaluated=10, n_feasible=5,
                    failure_counts={}),
            Optimum(l_m=4000e3, scenario="B", platform_name="siv",
                    best=None, n_evaluated=10, n_feasible=0,
                    failure_counts={"insufficient-reach": 10}),
        ]
        rows = sweep_rows(optima)
        assert len(rows) == 2
        assert rows[0][CSV_COLUMNS.index("feasible")] == "true"
        assert rows[1][CSV_COLUMNS.index("reason")] == "insufficient-reach"

    def test_tradeoff_gap_keeps_target_fidelity(self):
        points = [
            TradeoffPoint(f_t=0.95, best=feasible_point(), n_feasible=3),
            TradeoffPoint(f_t=1.0, best=None, n_feasible=0),
        ]
        rows = tradeoff_rows(points, 6000e3, "B", "siv")
        gap = dict(zip(CSV_COLUMNS, rows[1]))
        assert gap["F_t"] == "1.0"
        assert gap["L_km"] == "6000.0"
        assert gap["reason"] == REASON_NO_FEASIBLE_POINT


class TestCsvWriter:
    def test_header_then_rows_with_bare_newlines(self):
        buffer = io.StringIO()
        write_csv(buffer, [point_row(feasible_point(), "B", "siv")])
        text = buffer.getvalue()
        lines = text.split("\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert text.endswith("\n")
        assert "\r" not in text
        assert len(lines) == 3

    def test_wrong_width_row_rejected(self):
        with pytest.raises(ValidationError, match="cells"):
            write_csv(io.StringIO(), [["1", "B", "siv"]])


class TestJsonDocuments:
    def test_point_document_types(self):
        document = point_document(feasible_point(), "B", "siv")
        assert document["schema_version"] == SCHEMA_VERSION
        assert document["kind"] == "point"
        fields = document["point"]
        assert fields["feasible"] is True
        assert isinstance(fields["s"], int)
        assert isinstance(fields["R_Hz"], float)
        assert fields["L0_km"] == 1200.0
        assert "schema_version" not in fields

    def test_optimum_document_reports_grid_accounting(self):
        optimum = Optimum(l_m=6000e3, scenario="B", platform_name="siv",
                          best=None, n_evaluated=40, n_feasible=0,
                          failure_counts={"insufficient-reach": 30,
                                          "insufficient-hops": 10})
        document = optimum_document(optimum)
        assert document["optimum"] is None
        assert document["n_evaluated"] == 40
        assert document["L_km"] == 6000.0
        assert list(document["failure_counts"]) == [
            "insufficient-hops", "insufficient-reach"]

    def test_validation_document_counts_failures(self):
        checks = [
            CheckResult(name="a", passed=True, value=1.0, reference=1.0,
                        residual=0.0, tolerance=1e-2),
            CheckResult(name="b", passed=False, value=2.0, reference=1.0,
                        residual=1.0, tolerance=1e-2),
        ]
        document = validation_document(checks)
        assert document["passed"] is False
        assert document["n_checks"] == 2
        assert document["n_failed"] == 1
        assert document["checks"][1]["name"] == "b"

    def test_write_json_is_sorted_and_newline_terminated(self):
        buffer = io.StringIO()
        write_json(buffer, {"b": 1, "a": {"d": 2, "c": 3}})
        text = buffer.getvalue()
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"b": 1, "a": {"d": 2, "c": 3}}

    def test_infeasible_point_document_round_trips(self):
        document = point_document(infeasible_point(), "B", "siv")
        text = json.dumps(document, sort_keys=True)
        fields = json.loads(text)["point"]
        assert fields["feasible"] is False
        assert fields["reason"] == "unreachable-target"
        assert fields["R_Hz"] == 0.0
