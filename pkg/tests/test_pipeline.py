"""Unit tests for TrainingPipeline."""
import logging
from unittest.mock import MagicMock

import pytest

from errors import SolverRefusalError
from evaluator import OracleEvaluator
from pipeline import TrainingPipeline
from run_config import RunConfig


@pytest.fixture
def regression_csv(tmp_path):
    path = tmp_path / "regression.csv"
    path.write_text("x,y\n1,1\n2,2\n")
    return str(path)


@pytest.fixture
def kmeans_csv(tmp_path):
    path = tmp_path / "kmeans.csv"
    path.write_text("0\n0.1\n10\n10.1\n")
    return str(path)


@pytest.fixture
def svm_csv(tmp_path):
    path = tmp_path / "svm.csv"
    path.write_text("1,1\n-1,-1\n")
    return str(path)


class TestTrainingPipeline:
    """Test cases for TrainingPipeline."""

    def test_regression_formulation_metadata(self, regression_csv):
        cfg = RunConfig(model="regression", data=regression_csv, precision=("0.5", "1"))
        formulation = TrainingPipeline(cfg).formulate()
        meta = formulation.metadata()

        # Assertions
        assert meta["m"] == 4
        assert [entry["index"] for entry in meta["legend"]] == [0, 1, 2, 3]
        assert meta["legend"][0]["label"] == "w[0]@p=0.5"
        assert meta["variable_count"]["matches"]
        assert meta["variable_count"]["embedded_footprint"] == 16

    def test_regression_solve_and_verify(self, regression_csv):
        cfg = RunConfig(model="regression", data=regression_csv, precision=("0.5", "1"))
        report = TrainingPipeline(cfg).run("verify", verify=True)

        assert report["solution"]["w"] == [1.0, 0.0]
        assert report["solution"]["sse"] == 0.0
        assert report["verification"]["status"] == "passed"
        assert report["verification"]["gap"] == pytest.approx(0.0, abs=1e-12)
        assert report["variable_count"]["formula"] == "K(d+1)"

    def test_unrepresentable_analytic_solution_warns(self, tmp_path, caplog):
        path = tmp_path / "steep.csv"
        path.write_text("1,10\n2,20\n")
        cfg = RunConfig(model="regression", data=str(path), precision=("0.5", "1"))
        with caplog.at_level(logging.WARNING, logger="pipeline"):
            TrainingPipeline(cfg).run("solve")
        assert "outside the representable range" in caplog.text

    def test_kmeans_toy(self, kmeans_csv):
        cfg = RunConfig(model="kmeans", data=kmeans_csv, k=2)
        report = TrainingPipeline(cfg).run("verify", verify=True)

        assert report["qubo"]["m"] == 8
        assert report["solution"]["feasible"]
        assert report["solution"]["cost"] == pytest.approx(0.04, abs=1e-12)
        assert report["verification"]["status"] == "passed"
        assert abs(report["verification"]["gap"]) <= 1e-12

    def test_kmeans_legend(self, kmeans_csv):
        cfg = RunConfig(model="kmeans", data=kmeans_csv, k=2)
        formulation = TrainingPipeline(cfg).formulate()
        assert formulation.legend[:5] == ["x[0]->c[0]", "x[1]->c[0]", "x[2]->c[0]", "x[3]->c[0]", "x[0]->c[1]"]
        assert len(set(formulation.legend)) == formulation.qubo.m

    def test_svm_verification_reports_separation(self, svm_csv):
        cfg = RunConfig(model="svm", data=svm_csv, precision=("0.5", "1"))
        report = TrainingPipeline(cfg).run("verify", verify=True)
        verification = report["verification"]

        assert report["variable_count"]["actual"] == 2 * 2 + 2 * 2
        assert report["solver"]["energy"] == -3.75
        assert report["solution"]["feasibility"]["margins"] == [1.5, -1.5]
        assert verification["separated"] is False
        assert verification["passed"] is False
        assert verification["status"] == "failed"
        assert verification["oracle"]["objective"] == 1.0
        assert "feasibility" in report["solution"]

    def test_oracle_refusal_leaves_run_unverified(self, kmeans_csv):
        oracle = MagicMock(spec=OracleEvaluator)
        oracle.balanced_partitions.side_effect = SolverRefusalError("too many points")
        cfg = RunConfig(model="kmeans", data=kmeans_csv, k=2)
        report = TrainingPipeline(cfg, oracle=oracle).run("verify", verify=True)

        assert report["verification"]["status"] == "unverified"
        assert report["verification"]["passed"] is None
        oracle.balanced_partitions.assert_called_once()

    def test_anneal_backend(self, regression_csv):
        cfg = RunConfig(model="regression", data=regression_csv, precision=("0.5", "1"),
                        solver="anneal", sweeps=50, restarts=10, seed=3)
        report = TrainingPipeline(cfg).run("solve")

        assert report["solver"]["solver"] == "anneal"
        assert report["solver"]["restarts"] == 10
        assert report["solution"]["sse"] == 0.0
        assert report["verification"] is None

    def test_exact_cap_refusal_propagates(self, regression_csv):
        cfg = RunConfig(model="regression", data=regression_csv, precision=("0.5", "1"), exact_max_variables=3)
        with pytest.raises(SolverRefusalError):
            TrainingPipeline(cfg).run("solve")
