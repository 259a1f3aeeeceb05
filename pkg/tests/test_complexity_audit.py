"""Unit tests for the complexity audit."""
import csv
import json

import numpy as np
import pytest

from complexity_audit import (
    CLAIMED_EXPONENTS,
    AxisSweep,
    audit_construction_scaling,
    audit_variable_counts,
    default_count_sweep,
    default_scaling_sweeps,
    fit_exponent,
    symmetric_precision,
    write_records_csv,
    write_summary_json,
)
from errors import ConfigurationError
from qubo import QuboTerms


class TestSymmetricPrecision:
    """Test cases for symmetric_precision."""

    def test_four_entries(self):
        p = symmetric_precision(4)
        assert p.entries == (-1.0, -0.5, 0.5, 1.0)
        assert p.k_plus == 3

    @pytest.mark.parametrize("k", range(1, 17))
    def test_length_and_positive_entry(self, k):
        p = symmetric_precision(k)
        assert p.k == k
        assert p.k_plus is not None


class TestVariableCounts:
    """Test cases for audit_variable_counts."""

    def test_closed_forms(self):
        records = audit_variable_counts([
            ("regression", 8, 3, 0, 6),
            ("svm", 5, 2, 0, 4),
            ("kmeans", 6, 2, 3, 0),
        ])
        assert [r.m for r in records] == [24, 22, 18]
        assert all(r.m == r.expected_m for r in records)
        assert records[2].embedded_footprint == 18 ** 2

    def test_default_sweep(self):
        sweep = default_count_sweep()
        records = audit_variable_counts(sweep)
        assert len(records) == 30
        assert {r.model for r in records} == {"regression", "svm", "kmeans"}
        assert all(r.nonzeros > 0 for r in records)

    def test_kmeans_rows_skip_precision(self, mocker):
        symmetric = mocker.patch("complexity_audit.symmetric_precision", side_effect=AssertionError)
        records = audit_variable_counts([("kmeans", 6, 2, 3, 0), ("kmeans", 8, 3, 4, 0)])
        assert [r.m for r in records] == [18, 32]
        assert all(r.k_precision == 0 for r in records)
        symmetric.assert_not_called()

    def test_records_csv(self, tmp_path):
        records = audit_variable_counts([("kmeans", 4, 1, 2, 0)])
        path = tmp_path / "records.csv"
        write_records_csv(records, str(path))
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["model"] == "kmeans"
        assert rows[0]["m"] == "8"


class TestFitExponent:
    """Test cases for fit_exponent."""

    def test_recovers_power_law(self):
        sizes = [8, 16, 32, 64]
        assert fit_exponent(sizes, [3e-6 * s ** 2 for s in sizes]) == pytest.approx(2.0)

    def test_linear(self):
        sizes = np.array([10, 20, 40, 80])
        assert fit_exponent(sizes, 0.5 * sizes) == pytest.approx(1.0)


class TestConstructionScaling:
    """Test cases for audit_construction_scaling."""

    def test_refuses_short_sweeps(self):
        with pytest.raises(ConfigurationError):
            audit_construction_scaling([AxisSweep("kmeans", "n", (8, 16, 32))])

    def test_summary_uses_mocked_clock(self, mocker):
        """Test the fitted exponent comes from the timings, via a fake clock."""
        ticks = []
        now = [0.0]

        def fake_clock():
            ticks.append(now[0])
            return now[0]

        sizes = (4, 8, 16, 32)
        durations = iter([s ** 2 * 1e-6 for s in sizes])

        def advance(*args, **kwargs):
            now[0] += next(durations)

        mocker.patch("complexity_audit.time.perf_counter", side_effect=fake_clock)
        mocker.patch("complexity_audit._formulate", side_effect=advance)
        summary = audit_construction_scaling([AxisSweep("kmeans", "n", sizes, {"k": 2})], repeats=1)[0]

        assert summary["fitted_exponent"] == pytest.approx(2.0)
        assert summary["claimed_exponent"] == CLAIMED_EXPONENTS[("kmeans", "n")]
        assert summary["within_bound"]
        assert len(ticks) == 8

    def test_timing_excludes_dense_realization(self, mocker):
        mocker.patch.object(QuboTerms, "to_instance", side_effect=AssertionError)
        sweeps = [
            AxisSweep("svm", "n", (4, 8, 16, 32), {"d": 2, "precision": 4}),
            AxisSweep("kmeans", "k", (2, 4, 8, 16), {"n": 16, "d": 2}),
        ]
        summaries = audit_construction_scaling(sweeps, repeats=1)
        assert [len(s["wall_times"]) for s in summaries] == [4, 4]

    def test_default_sweeps_cover_audited_axes(self):
        axes = {(s.model, s.axis) for s in default_scaling_sweeps()}
        assert axes == {
            ("regression", "n"), ("regression", "d"),
            ("svm", "n"), ("svm", "d"), ("svm", "precision"),
            ("kmeans", "n"), ("kmeans", "k"), ("kmeans", "d"),
        }
        assert all(len(s.values) >= 4 for s in default_scaling_sweeps())

    def test_measured_exponents_within_bounds(self):
        summaries = audit_construction_scaling(repeats=5, seed=0)
        exceeded = [(s["model"], s["axis"], s["fitted_exponent"]) for s in summaries if not s["within_bound"]]
        assert exceeded == []

    def test_summary_json(self, tmp_path):
        path = tmp_path / "summary.json"
        write_summary_json([{"model": "svm", "axis": "d", "fitted_exponent": 0.9}], str(path))
        assert json.loads(path.read_text())["axes"][0]["model"] == "svm"
