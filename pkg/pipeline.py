"""Routes a run configuration through formulate, solve, decode and verify for each model."""
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from config import REPORT_SCHEMA_VERSION
from data_loader import DataLoader
from errors import SolverRefusalError
from evaluator import OracleEvaluator
from kmeans_formulator import KmeansProblem, decode_kmeans, formulate_kmeans
from precision_encoder import PrecisionMatrix, PrecisionVector
from qubo import QuboInstance
from qubo_solver import AnnealSolver, ExactSolver, SolverReport
from regression_formulator import (
    RegressionProblem,
    decode_regression,
    formulate_regression,
    is_representable,
    regression_precision_matrix,
    solve_regression_analytic,
    within_representable_range,
)
from run_config import RunConfig
from svm_formulator import (
    SvmProblem,
    decode_svm,
    formulate_svm,
    svm_precision_matrix,
    validate_classifier,
)

logger = logging.getLogger(__name__)


@dataclass
class Formulation:
    """A built QUBO together with what is needed to decode it."""

    model: str
    problem: Any
    qubo: QuboInstance
    legend: List[str]
    formula: str
    expected_variables: int
    wall_time: float
    precision: Optional[PrecisionVector] = None
    precision_matrix: Optional[PrecisionMatrix] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    def variable_count(self) -> Dict[str, Any]:
        return {
            "formula": self.formula,
            "expected": self.expected_variables,
            "actual": self.qubo.m,
            "matches": self.expected_variables == self.qubo.m,
            "embedded_footprint": self.qubo.m ** 2,
        }

    def metadata(self) -> Dict[str, Any]:
        """Sidecar document: ordering legend plus formulation facts."""
        doc = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "model": self.model,
            "m": self.qubo.m,
            "legend": [{"index": i, "label": label} for i, label in enumerate(self.legend)],
            "variable_count": self.variable_count(),
        }
        if self.precision is not None:
            doc["precision"] = self.precision.strings()
        doc.update(self.extras)
        return doc


class TrainingPipeline:
    """Model-agnostic front end; each model supplies formulate/decode/verify handlers."""

    def __init__(
        self,
        config: RunConfig,
        loader: Optional[DataLoader] = None,
        oracle: Optional[OracleEvaluator] = None,
    ):
        self.config = config
        self.loader = loader or DataLoader()
        self.oracle = oracle or OracleEvaluator()
        self._formulators: Dict[str, Callable[[], Formulation]] = {
            "regression": self._formulate_regression,
            "svm": self._formulate_svm,
            "kmeans": self._formulate_kmeans,
        }
        self._decoders = {
            "regression": self._decode_regression,
            "svm": self._decode_svm,
            "kmeans": self._decode_kmeans,
        }
        self._verifiers = {
            "regression": self._verify_regression,
            "svm": self._verify_svm,
            "kmeans": self._verify_kmeans,
        }

    def formulate(self) -> Formulation:
        logger.info("Formulating %s QUBO from %s", self.config.model, self.config.data)
        formulation = self._formulators[self.config.model]()
        logger.info(
            "Built QUBO with M=%d (%s), %d nonzeros in %.4fs",
            formulation.qubo.m, formulation.formula,
            formulation.qubo.nonzero_count(), formulation.wall_time,
        )
        return formulation

    def _formulate_regression(self) -> Formulation:
        prob = self.loader.load_regression(self.config.data)
        p = self.config.precision_vector
        started = time.perf_counter()
        qubo = formulate_regression(prob, p)
        elapsed = time.perf_counter() - started
        pm = regression_precision_matrix(prob, p)
        return Formulation(
            model="regression",
            problem=prob,
            qubo=qubo,
            legend=pm.labels(prob.parameter_names()),
            formula="K(d+1)",
            expected_variables=p.k * (prob.d + 1),
            wall_time=elapsed,
            precision=p,
            precision_matrix=pm,
            extras={"n": prob.n, "d": prob.d, "k_precision": p.k},
        )

    def _formulate_svm(self) -> Formulation:
        prob = self.loader.load_svm(self.config.data)
        p = self.config.precision_vector
        started = time.perf_counter()
        qubo = formulate_svm(prob, p)
        elapsed = time.perf_counter() - started
        pm = svm_precision_matrix(prob, p)
        return Formulation(
            model="svm",
            problem=prob,
            qubo=qubo,
            legend=pm.labels(prob.parameter_names()),
            formula="K(d+1)+N(K-K_plus+1)",
            expected_variables=p.k * (prob.d + 1) + prob.n * (p.k - p.k_plus + 1),
            wall_time=elapsed,
            precision=p,
            precision_matrix=pm,
            extras={"n": prob.n, "d": prob.d, "k_precision": p.k, "k_plus": p.k_plus},
        )

    def _formulate_kmeans(self) -> Formulation:
        cfg = self.config
        prob = self.loader.load_kmeans(cfg.data, cfg.k, cfg.alpha, cfg.beta).resolved()
        started = time.perf_counter()
        qubo = formulate_kmeans(prob)
        elapsed = time.perf_counter() - started
        legend = [f"x[{i}]->c[{j}]" for j in range(prob.k) for i in range(prob.n)]
        return Formulation(
            model="kmeans",
            problem=prob,
            qubo=qubo,
            legend=legend,
            formula="Nk",
            expected_variables=prob.n * prob.k,
            wall_time=elapsed,
            extras={"n": prob.n, "d": prob.d, "k": prob.k, "alpha": prob.alpha, "beta": prob.beta},
        )

    def solve(self, formulation: Formulation) -> SolverReport:
        cfg = self.config
        if cfg.solver == "exact":
            solver = ExactSolver(max_variables=cfg.exact_max_variables, workers=cfg.workers)
        else:
            solver = AnnealSolver(cfg.anneal_config())
        logger.info("Solving M=%d with the %s solver", formulation.qubo.m, cfg.solver)
        report = solver.solve(formulation.qubo)
        logger.info("Best energy %.12g", report.energy)
        return report

    def decode(self, formulation: Formulation, report: SolverReport) -> Dict[str, Any]:
        return self._decoders[formulation.model](formulation, report.best)

    def _decode_regression(self, formulation: Formulation, bits: List[int]) -> Dict[str, Any]:
        prob: RegressionProblem = formulation.problem
        sol = decode_regression(prob, formulation.precision, bits, formulation.qubo)
        analytic = solve_regression_analytic(prob)
        if not within_representable_range(analytic, formulation.precision):
            logger.warning(
                "Analytic solution %s lies outside the representable range of P=%s; "
                "consider rescaling features or widening the precision vector",
                np.round(analytic, 6).tolist(), formulation.precision.strings(),
            )
        doc = sol.to_dict()
        doc["y_t_y"] = float(prob.y @ prob.y)
        return doc

    def _decode_svm(self, formulation: Formulation, bits: List[int]) -> Dict[str, Any]:
        prob: SvmProblem = formulation.problem
        sol = decode_svm(prob, formulation.precision_matrix, bits)
        doc = sol.to_dict()
        doc["feasibility"] = validate_classifier(sol, prob).to_dict()
        return doc

    def _decode_kmeans(self, formulation: Formulation, bits: List[int]) -> Dict[str, Any]:
        prob: KmeansProblem = formulation.problem
        decoded = decode_kmeans(prob, bits, formulation.qubo)
        if not decoded.feasible:
            logger.warning(
                "Decoded assignment is infeasible (row violations=%d, column sums=%s)",
                decoded.row_violations, decoded.column_sums,
            )
        return decoded.to_dict()

    def verify(self, formulation: Formulation, solution: Dict[str, Any]) -> Dict[str, Any]:
        """
        Compare a decoded solution with the model's oracle.

        Returns:
            Verification section with status passed/failed/unverified
        """
        try:
            return self._verifiers[formulation.model](formulation, solution)
        except SolverRefusalError as e:
            logger.warning("Oracle refused the instance, leaving it unverified: %s", str(e))
            return {"status": "unverified", "passed": None, "gap": None, "reason": str(e), "oracle": None}

    def _verify_regression(self, formulation: Formulation, solution: Dict[str, Any]) -> Dict[str, Any]:
        prob: RegressionProblem = formulation.problem
        oracle = self.oracle.regression(prob)
        w_oracle = oracle.parameters["w"]
        rounded = formulation.precision_matrix.decode(formulation.precision_matrix.encode_nearest(w_oracle))
        rounded_sse = prob.sse(rounded)
        tol = 1e-8 * (1.0 + abs(oracle.objective))
        gap = float(solution["sse"] - oracle.objective)
        passed = bool(gap >= -tol and solution["sse"] <= rounded_sse + tol)
        return {
            "status": "passed" if passed else "failed",
            "passed": passed,
            "gap": gap,
            "criterion": "analytic sse <= decoded sse <= sse of the nearest representable analytic weights",
            "analytic_representable": bool(is_representable(w_oracle, formulation.precision)),
            "rounded_sse": rounded_sse,
            "oracle": oracle.to_dict(),
        }

    def _verify_svm(self, formulation: Formulation, solution: Dict[str, Any]) -> Dict[str, Any]:
        prob: SvmProblem = formulation.problem
        separated = bool(solution["feasibility"]["separated"])
        norm = float(np.sum(np.square(solution["w"])))
        try:
            oracle = self.oracle.svm_margins(prob, formulation.precision)
        except SolverRefusalError as e:
            logger.warning("SVM grid oracle refused the instance: %s", str(e))
            return {
                "status": "unverified",
                "passed": None,
                "gap": None,
                "separated": separated,
                "reason": str(e),
                "oracle": None,
            }
        gap = None if oracle.objective is None else float(norm - oracle.objective)
        return {
            "status": "passed" if separated else "failed",
            "passed": separated,
            "gap": gap,
            "criterion": "decoded classifier separates the training data (margins > 0)",
            "separated": separated,
            "w_norm_squared": norm,
            "oracle": oracle.to_dict(),
        }

    def _verify_kmeans(self, formulation: Formulation, solution: Dict[str, Any]) -> Dict[str, Any]:
        prob: KmeansProblem = formulation.problem
        oracle = self.oracle.balanced_partitions(prob)
        gap = float(solution["cost"] - oracle.objective)
        passed = bool(solution["feasible"] and abs(gap) <= 1e-9 * (1.0 + abs(oracle.objective)))
        return {
            "status": "passed" if passed else "failed",
            "passed": passed,
            "gap": gap,
            "criterion": "feasible assignment whose within-cluster cost equals the balanced-partition minimum",
            "oracle": oracle.to_dict(),
        }

    def run(self, command: str, verify: bool = False) -> Dict[str, Any]:
        """
        Formulate, solve, decode and (optionally) verify.

        Args:
            command: Command name echoed into the report
            verify: Run the matching oracle

        Returns:
            RunReport dictionary
        """
        formulation = self.formulate()
        report = self.solve(formulation)
        solution = self.decode(formulation, report)
        verification = self.verify(formulation, solution) if verify else None
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "command": command,
            "config": self.config.to_dict(),
            "qubo": {
                "m": formulation.qubo.m,
                "nonzeros": formulation.qubo.nonzero_count(),
                "wall_time": formulation.wall_time,
            },
            "variable_count": formulation.variable_count(),
            "solver": report.to_dict(),
            "solution": solution,
            "verification": verification,
        }
