"""Unit tests for RunConfig."""
import pytest

from errors import ConfigurationError
from qubo_solver import AnnealConfig
from run_config import RunConfig


class TestRunConfig:
    """Test cases for RunConfig."""

    @pytest.fixture
    def config_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# regression run\n"
            "MODEL=regression\n"
            "DATA=train.csv\n"
            "PRECISION=0.5,1\n"
            "SOLVER=anneal\n"
            "SWEEPS=40\n"
            "VERIFY=true\n"
        )
        return str(path)

    def test_defaults(self):
        cfg = RunConfig(model="regression", data="d.csv")
        assert cfg.solver == "exact"
        assert cfg.precision_vector.entries == (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
        assert cfg.exact_max_variables == 25

    def test_file_values(self, config_file):
        cfg = RunConfig.from_sources(config_file)

        # Assertions
        assert cfg.model == "regression"
        assert cfg.precision == ("0.5", "1")
        assert cfg.solver == "anneal"
        assert cfg.sweeps == 40
        assert cfg.verify is True

    def test_flags_override_file(self, config_file):
        cfg = RunConfig.from_sources(config_file, {"sweeps": 10, "precision": "-1,1", "seed": None})
        assert cfg.sweeps == 10
        assert cfg.precision == ("-1", "1")
        assert cfg.seed == 0

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            RunConfig.from_sources(str(tmp_path / "absent.cfg"), {"model": "svm", "data": "x.csv"})

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("MODEL=svm\nDATA=x.csv\nTEMPERATURE=3\n")
        with pytest.raises(ConfigurationError) as excinfo:
            RunConfig.from_sources(str(path))
        assert "temperature" in str(excinfo.value)

    def test_missing_required(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_sources(None, {"model": "regression"})

    def test_bad_number(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_sources(None, {"model": "kmeans", "data": "x.csv", "k": "two"})

    def test_invalid_precision_names_entry(self):
        with pytest.raises(ConfigurationError) as excinfo:
            RunConfig(model="regression", data="d.csv", precision=("0.5", "0.3"))
        assert "'0.3'" in str(excinfo.value)

    def test_svm_needs_positive_entry(self):
        with pytest.raises(ConfigurationError):
            RunConfig(model="svm", data="d.csv", precision=("-1", "-0.5"))

    def test_kmeans_needs_k(self):
        with pytest.raises(ConfigurationError):
            RunConfig(model="kmeans", data="d.csv")

    def test_kmeans_negative_penalty(self):
        with pytest.raises(ConfigurationError):
            RunConfig(model="kmeans", data="d.csv", k=2, alpha=-1.0)

    def test_invalid_schedule_rejected(self):
        with pytest.raises(ConfigurationError):
            RunConfig(model="regression", data="d.csv", t_hi=1e-4, t_lo=1e-3)

    def test_anneal_config(self):
        cfg = RunConfig(model="regression", data="d.csv", sweeps=7, restarts=3, seed=11, workers=2)
        assert cfg.anneal_config() == AnnealConfig(sweeps=7, restarts=3, seed=11, workers=2)

    def test_to_dict_lists_precision(self):
        doc = RunConfig(model="regression", data="d.csv", precision=("0.5", "1")).to_dict()
        assert doc["precision"] == ["0.5", "1"]
        assert doc["model"] == "regression"
