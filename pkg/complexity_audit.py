"""Executable checks of the variable-count formulas and construction-time growth."""
import csv
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import ConfigurationError, VerificationFailure
from kmeans_formulator import KmeansProblem, kmeans_terms
from precision_encoder import PrecisionVector
from qubo import QuboTerms
from regression_formulator import RegressionProblem, regression_terms
from svm_formulator import SvmProblem, svm_terms

logger = logging.getLogger(__name__)

MIN_SWEEP_POINTS = 4
EXPONENT_ALLOWANCE = 0.5

# construction-time exponents claimed per (model, axis)
CLAIMED_EXPONENTS: Dict[Tuple[str, str], float] = {
    ("regression", "n"): 1.0,
    ("regression", "d"): 2.0,
    ("regression", "precision"): 2.0,
    ("svm", "n"): 1.0,
    ("svm", "d"): 1.0,
    ("svm", "precision"): 2.0,
    ("kmeans", "n"): 2.0,
    ("kmeans", "k"): 1.0,
    ("kmeans", "d"): 1.0,
}


@dataclass(frozen=True)
class ScalingRecord:
    model: str
    n: int
    d: int
    k: int
    k_precision: int
    m: int
    expected_m: int
    wall_time: float
    nonzeros: int
    embedded_footprint: int


@dataclass(frozen=True)
class AxisSweep:
    """Vary one axis of a model over values, holding the others at `fixed`."""

    model: str
    axis: str
    values: Tuple[int, ...]
    fixed: Dict[str, int] = field(default_factory=dict)


def symmetric_precision(k: int) -> PrecisionVector:
    """K entries, ceil(K/2) positive powers of two and the rest their negatives."""
    if k < 1:
        raise ConfigurationError(f"precision length must be positive, got {k}")
    n_pos = k - k // 2
    positives = [2.0 ** (j - n_pos // 2) for j in range(n_pos)]
    negatives = [-v for v in positives[: k // 2]]
    return PrecisionVector(tuple(sorted(negatives + positives)))


def expected_variables(model: str, n: int, d: int, k: int, p: Optional[PrecisionVector]) -> int:
    if model == "regression":
        return p.k * (d + 1)
    if model == "svm":
        return p.k * (d + 1) + n * (p.k - p.k_plus + 1)
    if model == "kmeans":
        return n * k
    raise ConfigurationError(f"unknown model {model!r}")


def _random_problem(model: str, n: int, d: int, k: int, rng: np.random.Generator):
    x = rng.normal(size=(n, d))
    if model == "regression":
        return RegressionProblem(x, rng.normal(size=n))
    if model == "svm":
        labels = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        if n == 1:
            raise ConfigurationError("svm needs at least 2 points so both classes are present")
        return SvmProblem(x, labels)
    if model == "kmeans":
        return KmeansProblem(x, k).resolved()
    raise ConfigurationError(f"unknown model {model!r}")


def _precision_for(model: str, k_precision: int) -> Optional[PrecisionVector]:
    """k-means has no precision vector; its K column is 0."""
    return None if model == "kmeans" else symmetric_precision(k_precision)


def _formulate(model: str, prob, p: Optional[PrecisionVector]) -> QuboTerms:
    if model == "regression":
        return regression_terms(prob, p)
    if model == "svm":
        return svm_terms(prob, p)
    return kmeans_terms(prob)


def _timed_formulate(
    model: str, prob, p: Optional[PrecisionVector], repeats: int
) -> Tuple[QuboTerms, float]:
    """Term assembly only; the dense M x M realization is not timed."""
    best = float("inf")
    terms = None
    for _ in range(max(1, repeats)):
        started = time.perf_counter()
        terms = _formulate(model, prob, p)
        best = min(best, time.perf_counter() - started)
    return terms, best


def audit_variable_counts(
    sweep: Sequence[Tuple[str, int, int, int, int]], seed: int = 0
) -> List[ScalingRecord]:
    """
    Build each (model, N, d, k, K) instance and check M against its closed form.

    Args:
        sweep: Tuples of (model, N, d, k, K); k is ignored except for kmeans,
            K is ignored for kmeans
        seed: Seed for the random training data

    Returns:
        One ScalingRecord per sweep point
    """
    rng = np.random.default_rng(seed)
    records = []
    for model, n, d, k, k_precision in sweep:
        p = _precision_for(model, k_precision)
        prob = _random_problem(model, n, d, k, rng)
        terms, elapsed = _timed_formulate(model, prob, p, repeats=1)
        qubo = terms.to_instance()
        expected = expected_variables(model, n, d, k, p)
        if qubo.m != expected:
            raise VerificationFailure(
                f"{model} with N={n}, d={d}, k={k}, K={k_precision}: M={qubo.m}, formula gives {expected}"
            )
        records.append(ScalingRecord(
            model=model,
            n=n,
            d=d,
            k=k if model == "kmeans" else 0,
            k_precision=k_precision if model != "kmeans" else 0,
            m=qubo.m,
            expected_m=expected,
            wall_time=elapsed,
            nonzeros=qubo.nonzero_count(),
            embedded_footprint=qubo.m ** 2,
        ))
    return records


def default_count_sweep() -> List[Tuple[str, int, int, int, int]]:
    """30 points, ten per model."""
    sweep = []
    for i in range(10):
        sweep.append(("regression", 5 + 3 * i, 1 + i % 4, 0, 1 + i % 6))
        sweep.append(("svm", 2 + i, 1 + i % 3, 0, 2 + i % 5))
        sweep.append(("kmeans", 4 + i, 1 + i % 3, 2 + i % 3, 0))
    return sweep


def default_scaling_sweeps() -> List[AxisSweep]:
    """Sizes where term assembly, not per-call overhead, dominates the timing."""
    return [
        AxisSweep("regression", "n", (50_000, 100_000, 200_000, 400_000), {"d": 4, "precision": 6}),
        AxisSweep("regression", "d", (16, 32, 64, 128), {"n": 2000, "precision": 4}),
        AxisSweep("svm", "n", (4096, 8192, 16384, 32768), {"d": 2, "precision": 4}),
        AxisSweep("svm", "d", (32, 64, 128, 256), {"n": 256, "precision": 4}),
        AxisSweep("svm", "precision", (4, 8, 16, 32), {"n": 256, "d": 2}),
        AxisSweep("kmeans", "n", (32, 64, 128, 256), {"d": 2, "k": 2}),
        AxisSweep("kmeans", "k", (2, 4, 8, 16), {"n": 128, "d": 2}),
        AxisSweep("kmeans", "d", (16, 64, 256, 1024), {"n": 64, "k": 2}),
    ]


def fit_exponent(sizes: Sequence[float], times: Sequence[float]) -> float:
    """Least-squares slope of log(time) against log(size)."""
    slope, _ = np.polyfit(np.log(np.asarray(sizes, dtype=float)), np.log(np.asarray(times, dtype=float)), 1)
    return float(slope)


def audit_construction_scaling(
    sweeps: Optional[Sequence[AxisSweep]] = None, repeats: int = 5, seed: int = 0
) -> List[Dict]:
    """
    Time QUBO term assembly along each axis and fit a log-log growth exponent.

    Runs sequentially; each timing is the minimum over `repeats` builds. The
    dense M x M realization is O(M^2) storage and is not part of the timing.

    Args:
        sweeps: Axis sweeps, default_scaling_sweeps() when omitted
        repeats: Builds per point
        seed: Seed for the random training data

    Returns:
        One summary per axis with fitted and claimed exponents
    """
    sweeps = list(sweeps) if sweeps is not None else default_scaling_sweeps()
    rng = np.random.default_rng(seed)
    summaries = []
    for sweep in sweeps:
        if len(sweep.values) < MIN_SWEEP_POINTS:
            raise ConfigurationError(
                f"refusing to fit {sweep.model}/{sweep.axis} from {len(sweep.values)} sizes; "
                f"need at least {MIN_SWEEP_POINTS}"
            )
        times = []
        for value in sweep.values:
            params = {"n": 8, "d": 2, "k": 2, "precision": 4}
            params.update(sweep.fixed)
            params[sweep.axis] = value
            p = _precision_for(sweep.model, params["precision"])
            prob = _random_problem(sweep.model, params["n"], params["d"], params["k"], rng)
            _, elapsed = _timed_formulate(sweep.model, prob, p, repeats)
            times.append(max(elapsed, 1e-9))
        fitted = fit_exponent(sweep.values, times)
        claimed = CLAIMED_EXPONENTS[(sweep.model, sweep.axis)]
        bound = claimed + EXPONENT_ALLOWANCE
        logger.info(
            "%s/%s: fitted exponent %.2f (claimed %.1f, bound %.1f)",
            sweep.model, sweep.axis, fitted, claimed, bound,
        )
        summaries.append({
            "model": sweep.model,
            "axis": sweep.axis,
            "values": list(sweep.values),
            "fixed": dict(sweep.fixed),
            "wall_times": times,
            "fitted_exponent": fitted,
            "claimed_exponent": claimed,
            "bound": bound,
            "within_bound": fitted <= bound,
        })
    return summaries


def write_records_csv(records: Sequence[ScalingRecord], path: str):
    names = list(ScalingRecord.__dataclass_fields__)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=names)
        writer.writeheader()
        for record in records:
            writer.writerow(asdict(record))


def write_summary_json(summaries: Sequence[Dict], path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"axes": list(summaries)}, fh, indent=2)
        fh.write("\n")
