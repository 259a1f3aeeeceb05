"""Linear-regression training as a QUBO, plus the analytic least-squares solution."""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from errors import DimensionMismatchError
from precision_encoder import (
    PrecisionMatrix,
    PrecisionVector,
    build_regression_precision_matrix,
    nonzero_entries,
    representable_values,
)
from qubo import BitVector, QuboInstance, QuboTerms, as_bits, bits_to_list, evaluate

logger = logging.getLogger(__name__)

PINV_RELATIVE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class RegressionProblem:
    """Training data X (N x d) and targets Y (N)."""

    x_raw: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_raw, dtype=float)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.ndim != 2:
            raise DimensionMismatchError(f"X must be a matrix, got shape {x.shape}")
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError(f"need N >= 1 and d >= 1, got X of shape {x.shape}")
        if y.shape[0] != x.shape[0]:
            raise DimensionMismatchError(f"X has {x.shape[0]} rows but Y has {y.shape[0]} entries")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("regression data must be finite")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x_raw", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x_raw.shape[0]

    @property
    def d(self) -> int:
        return self.x_raw.shape[1]

    @property
    def x_aug(self) -> np.ndarray:
        """X with a trailing column of ones (intercept last)."""
        return np.hstack([self.x_raw, np.ones((self.n, 1))])

    def sse(self, w: Sequence[float]) -> float:
        residual = self.x_aug @ np.asarray(w, dtype=float) - self.y
        return float(residual @ residual)

    def parameter_names(self) -> List[str]:
        return [f"w[{j}]" for j in range(self.d + 1)]


@dataclass(frozen=True)
class RegressionSolution:
    w: np.ndarray
    sse: float
    qubo_energy: float
    bits: List[int]

    def to_dict(self) -> dict:
        return {
            "w": [float(v) for v in self.w],
            "intercept": float(self.w[-1]),
            "sse": self.sse,
            "qubo_energy": self.qubo_energy,
            "bits": list(self.bits),
        }


def regression_terms(prob: RegressionProblem, p: PrecisionVector) -> QuboTerms:
    """
    Terms of A = P^T X^T X P and b = -2 P^T X^T Y.

    X^T X is formed first (O(N d^2)), then expanded with the precision
    structure (O(d^2 K^2)). The constant Y^T Y is dropped.
    """
    pm = build_regression_precision_matrix(p, prob.d)
    x_aug = prob.x_aug
    gram = x_aug.T @ x_aug
    xty = x_aug.T @ prob.y
    rows, cols, values = pm.congruence_terms(*nonzero_entries(gram))
    return QuboTerms(pm.shape[1], rows, cols, values, -2.0 * pm.transpose_apply(xty))


def formulate_regression(prob: RegressionProblem, p: PrecisionVector) -> QuboInstance:
    """
    Build the regression QUBO.

    Args:
        prob: Regression training data
        p: Precision vector shared by all weights

    Returns:
        QuboInstance with M = K(d+1) variables
    """
    return regression_terms(prob, p).to_instance()


def decode_regression(
    prob: RegressionProblem,
    p: PrecisionVector,
    bits: Union[Sequence[int], BitVector],
    qubo: Optional[QuboInstance] = None,
) -> RegressionSolution:
    pm = build_regression_precision_matrix(p, prob.d)
    z = as_bits(bits, pm.shape[1])
    w = pm.decode(z)
    if qubo is None:
        qubo = formulate_regression(prob, p)
    return RegressionSolution(
        w=w,
        sse=prob.sse(w),
        qubo_energy=evaluate(qubo, z),
        bits=bits_to_list(z),
    )


def solve_regression_analytic(prob: RegressionProblem) -> np.ndarray:
    """
    Least-squares weights from the normal equations.

    Falls back to the minimum-norm pseudo-inverse solution when X^T X is
    rank deficient (singular values below 1e-10 * the largest one).

    Args:
        prob: Regression training data

    Returns:
        Weight vector of length d+1, intercept last
    """
    x_aug = prob.x_aug
    gram = x_aug.T @ x_aug
    xty = x_aug.T @ prob.y
    singular = np.linalg.svd(gram, compute_uv=False)
    rank = int(np.sum(singular > PINV_RELATIVE_TOLERANCE * singular[0]))
    if rank == gram.shape[0]:
        return np.linalg.solve(gram, xty)
    logger.info("X^T X has rank %d < %d; using the pseudo-inverse", rank, gram.shape[0])
    return np.linalg.pinv(gram, rcond=PINV_RELATIVE_TOLERANCE) @ xty


def is_representable(w: Sequence[float], p: PrecisionVector, atol: float = 0.0) -> bool:
    values = representable_values(p)
    return all(np.min(np.abs(values - float(v))) <= atol for v in w)


def within_representable_range(w: Sequence[float], p: PrecisionVector) -> bool:
    values = representable_values(p)
    return bool(np.all((np.asarray(w) >= values[0]) & (np.asarray(w) <= values[-1])))


def regression_summation_energy(
    prob: RegressionProblem, p: PrecisionVector, bits: Union[Sequence[int], BitVector]
) -> float:
    """Expanded-sum form of the regression QUBO objective, computed loop by loop."""
    k = p.k
    cols = prob.d + 1
    z = as_bits(bits, k * cols)
    x = prob.x_aug
    pv = p.entries
    energy = 0.0
    for i in range(prob.n):
        for j in range(cols):
            for l in range(cols):
                for a in range(k):
                    for c in range(k):
                        energy += x[i, j] * x[i, l] * pv[a] * pv[c] * z[j * k + a] * z[l * k + c]
        for j in range(cols):
            for a in range(k):
                energy -= 2.0 * x[i, j] * prob.y[i] * pv[a] * z[j * k + a]
    return float(energy)


def regression_precision_matrix(prob: RegressionProblem, p: PrecisionVector) -> PrecisionMatrix:
    return build_regression_precision_matrix(p, prob.d)
