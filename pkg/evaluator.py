"""Independent classical oracles used to verify decoded QUBO solutions."""
import logging
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, List, Optional

import numpy as np

from config import QUBO_ORACLE_MAX_GRID, QUBO_ORACLE_MAX_POINTS
from errors import SolverRefusalError
from precision_encoder import PrecisionVector, representable_values
from regression_formulator import RegressionProblem, solve_regression_analytic
from kmeans_formulator import KmeansProblem, weighted_kmeans_cost
from svm_formulator import SvmProblem

logger = logging.getLogger(__name__)

GRID_CHUNK = 65536


@dataclass(frozen=True)
class OracleReport:
    """Result of one oracle run."""

    method: str
    objective: Optional[float]
    parameters: Dict[str, Any]
    wall_time: float
    status: str = "ok"
    objective_recomputed: Optional[float] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        if self.objective is None or self.objective_recomputed is None:
            return True
        return abs(self.objective - self.objective_recomputed) <= 1e-10 * (1.0 + abs(self.objective))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "status": self.status,
            "objective": self.objective,
            "objective_recomputed": self.objective_recomputed,
            "parameters": self.parameters,
            "extras": self.extras,
            "wall_time": self.wall_time,
        }


class OracleEvaluator:
    """Brute-force and analytic references, kept apart from the QUBO assembly code."""

    def __init__(self, max_points: int = QUBO_ORACLE_MAX_POINTS, max_grid: int = QUBO_ORACLE_MAX_GRID):
        self.max_points = max_points
        self.max_grid = max_grid

    def regression(self, prob: RegressionProblem) -> OracleReport:
        """
        Analytic least squares (normal equations, pseudo-inverse when singular).

        Args:
            prob: Regression training data

        Returns:
            OracleReport with weights and the residual sum of squares
        """
        started = time.perf_counter()
        w = solve_regression_analytic(prob)
        residual = prob.x_aug @ w - prob.y
        sse = float(np.sum(residual ** 2))
        # recompute without the augmented matrix as an independent check
        refit = prob.x_raw @ w[:-1] + w[-1] - prob.y
        return OracleReport(
            method="normal_equations",
            objective=sse,
            objective_recomputed=float(refit @ refit),
            parameters={"w": [float(v) for v in w]},
            wall_time=time.perf_counter() - started,
        )

    def balanced_partitions(self, prob: KmeansProblem) -> OracleReport:
        """
        Exhaustive search over partitions into k groups of size floor/ceil(N/k).

        Partitions are enumerated as restricted growth strings in lexicographic
        order, so the first minimum found is the lexicographically smallest one.

        Args:
            prob: Clustering problem with N <= max_points

        Returns:
            OracleReport with the minimum pairwise within-cluster cost
        """
        if prob.n > self.max_points:
            raise SolverRefusalError(
                f"balanced-partition oracle is capped at {self.max_points} points, got {prob.n}"
            )
        started = time.perf_counter()
        n, k = prob.n, prob.k
        lo, hi = prob.size_bounds()
        x = prob.x
        pair = np.array([[float(np.sum((x[i] - x[j]) ** 2)) for j in range(n)] for i in range(n)])

        best_cost = float("inf")
        best_labels: List[int] = []
        labels = [0] * n
        sizes = [0] * k
        examined = 0

        def place(i: int, used: int, cost: float):
            nonlocal best_cost, best_labels, examined
            if i == n:
                examined += 1
                if used == k and all(lo <= s <= hi for s in sizes) and cost < best_cost:
                    best_cost, best_labels = cost, list(labels)
                return
            # remaining points must still be able to open the missing clusters
            if k - used > n - i:
                return
            for c in range(min(used + 1, k)):
                if sizes[c] >= hi:
                    continue
                added = 2.0 * sum(pair[i, j] for j in range(i) if labels[j] == c)
                labels[i] = c
                sizes[c] += 1
                place(i + 1, max(used, c + 1), cost + added)
                sizes[c] -= 1
            labels[i] = 0

        place(0, 0, 0.0)
        recomputed = sum(
            pair[i, j] for i in range(n) for j in range(n) if best_labels[i] == best_labels[j]
        )
        return OracleReport(
            method="balanced_partition_enumeration",
            objective=float(best_cost),
            objective_recomputed=float(recomputed),
            parameters={"labels": best_labels},
            extras={
                "partitions_examined": examined,
                "weighted_cost": weighted_kmeans_cost(x, best_labels),
            },
            wall_time=time.perf_counter() - started,
        )

    def svm_margins(self, prob: SvmProblem, p: PrecisionVector) -> OracleReport:
        """
        Hard-margin SVM restricted to representable (w, b).

        Searches every combination of representable values for the point with
        all margins >= 1 and the smallest ||w||^2.

        Args:
            prob: Labeled training data
            p: Precision vector defining the representable grid

        Returns:
            OracleReport, status "infeasible" when no grid point satisfies all margins
        """
        values = representable_values(p)
        dims = prob.d + 1
        grid_size = len(values) ** dims
        if grid_size > self.max_grid:
            raise SolverRefusalError(
                f"representable grid has {grid_size} points, above the cap of {self.max_grid}"
            )
        started = time.perf_counter()
        best_norm = float("inf")
        best = None
        combos = product(values, repeat=dims)
        while True:
            chunk = np.array(list(_take(combos, GRID_CHUNK)), dtype=float)
            if chunk.size == 0:
                break
            w, b = chunk[:, :-1], chunk[:, -1]
            margins = prob.y[None, :] * (w @ prob.x.T + b[:, None])
            feasible = np.all(margins >= 1.0, axis=1)
            if not np.any(feasible):
                continue
            norms = np.where(feasible, np.sum(w * w, axis=1), np.inf)
            idx = int(np.argmin(norms))
            if norms[idx] < best_norm:
                best_norm, best = float(norms[idx]), chunk[idx]

        elapsed = time.perf_counter() - started
        if best is None:
            logger.info("No representable (w, b) satisfies every margin constraint")
            return OracleReport(
                method="representable_grid_search",
                objective=None,
                parameters={},
                status="infeasible",
                extras={"grid_size": grid_size},
                wall_time=elapsed,
            )
        w, b = best[:-1], float(best[-1])
        return OracleReport(
            method="representable_grid_search",
            objective=best_norm,
            objective_recomputed=float(sum(v * v for v in w)),
            parameters={
                "w": [float(v) for v in w],
                "b": b,
                "margins": [float(m) for m in prob.y * (prob.x @ w + b)],
            },
            extras={"grid_size": grid_size},
            wall_time=elapsed,
        )


def _take(iterator, count: int):
    for _, item in zip(range(count), iterator):
        yield item


def oracle_regression(prob: RegressionProblem) -> OracleReport:
    return OracleEvaluator().regression(prob)


def oracle_balanced_partitions(prob: KmeansProblem) -> OracleReport:
    return OracleEvaluator().balanced_partitions(prob)


def oracle_svm_margins(prob: SvmProblem, p: PrecisionVector) -> OracleReport:
    return OracleEvaluator().svm_margins(prob, p)
