"""SVM Lagrangian-dual training as a QUBO over theta = [w; b; lambda]."""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import ConfigurationError, DimensionMismatchError
from precision_encoder import PrecisionMatrix, PrecisionVector, build_svm_precision_matrix
from qubo import BitVector, QuboInstance, QuboTerms, as_bits, bits_to_list

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SvmProblem:
    """Training points X (N x d) with labels Y in {-1, +1}."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise DimensionMismatchError(f"X must be a non-empty matrix, got shape {x.shape}")
        if y.shape[0] != x.shape[0]:
            raise DimensionMismatchError(f"X has {x.shape[0]} rows but Y has {y.shape[0]} labels")
        if not np.all(np.isfinite(x)):
            raise ValueError("SVM features must be finite")
        if not np.all((y == 1) | (y == -1)):
            raise ValueError("SVM labels must be exactly -1 or +1")
        if not (np.any(y == 1) and np.any(y == -1)):
            raise ValueError("SVM training data needs at least one point of each class")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def flipped(self) -> "SvmProblem":
        return SvmProblem(self.x, -self.y)

    def parameter_names(self) -> List[str]:
        return [f"w[{j}]" for j in range(self.d)] + ["b"] + [f"lambda[{i}]" for i in range(self.n)]


@dataclass(frozen=True)
class SvmDualStructure:
    """Raw (non-symmetric) U, v and X (.) Y' of the dual objective theta^T U theta + theta^T v."""

    u: np.ndarray
    v: np.ndarray
    x_hadamard_y: np.ndarray


@dataclass(frozen=True)
class SvmSolution:
    w: np.ndarray
    b: float
    lam: np.ndarray
    margins: np.ndarray
    dual_objective: float
    bits: Optional[List[int]] = None

    def to_dict(self) -> Dict:
        return {
            "w": [float(v) for v in self.w],
            "b": float(self.b),
            "lambda": [float(v) for v in self.lam],
            "margins": [float(v) for v in self.margins],
            "dual_objective": self.dual_objective,
            "bits": self.bits,
        }


@dataclass(frozen=True)
class FeasibilityReport:
    margins: List[float]
    violations: int
    separated: bool

    def to_dict(self) -> Dict:
        return {
            "margins": self.margins,
            "violations": self.violations,
            "separated": self.separated,
        }


def dual_entries(prob: SvmProblem) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Nonzero pattern of U as (rows, cols, values) over theta = [w (d); b (1); lambda (N)].

    -1 on the w diagonal, (X.Y')^T in the w-lambda block and Y^T in the
    b-lambda row; built in O(N d) without the (N+d+1)^2 matrix.
    """
    n, d = prob.n, prob.d
    xy = prob.x * prob.y[:, None]
    lam = d + 1 + np.arange(n)
    rows = np.concatenate([np.arange(d), np.repeat(np.arange(d), n), np.full(n, d)])
    cols = np.concatenate([np.arange(d), np.tile(lam, d), lam])
    values = np.concatenate([-np.ones(d), xy.T.reshape(-1), prob.y])
    return rows, cols, values


def dual_linear(prob: SvmProblem) -> np.ndarray:
    """v = -[0; 0; 1_N]."""
    return np.concatenate([np.zeros(prob.d + 1), -np.ones(prob.n)])


def build_dual_structure(prob: SvmProblem) -> SvmDualStructure:
    """
    Assemble U and v for theta = [w (d); b (1); lambda (N)].

    U = [[-I_d, 0, (X.Y')^T], [0, 0, Y^T], [0, 0, 0]] and v = -[0; 0; 1_N].
    U stays non-symmetric here; symmetrization happens once at QUBO assembly.
    """
    size = prob.n + prob.d + 1
    rows, cols, values = dual_entries(prob)
    u = np.zeros((size, size))
    u[rows, cols] = values
    return SvmDualStructure(u=u, v=dual_linear(prob), x_hadamard_y=prob.x * prob.y[:, None])


def svm_precision_matrix(prob: SvmProblem, p: PrecisionVector) -> PrecisionMatrix:
    return build_svm_precision_matrix(p, prob.d, prob.n)


def svm_terms(prob: SvmProblem, p: PrecisionVector) -> QuboTerms:
    """Terms of A = sym(P^T U P) and b = P^T v, O(N d K^2) of them."""
    if p.k_plus is None:
        raise ConfigurationError(
            f"precision vector {p.strings()} has no positive entry; SVM multipliers need one"
        )
    pm = svm_precision_matrix(prob, p)
    rows, cols, values = pm.congruence_terms(*dual_entries(prob))
    return QuboTerms(pm.shape[1], rows, cols, values, pm.transpose_apply(dual_linear(prob)))


def formulate_svm(prob: SvmProblem, p: PrecisionVector) -> QuboInstance:
    """
    Build A = sym(P^T U P), b = P^T v with theta_hat = [w_hat; b_hat; lambda_hat].

    Args:
        prob: Labeled training data
        p: Precision vector; must contain a positive entry

    Returns:
        QuboInstance with M = K(d+1) + N(K - K_plus + 1)
    """
    return svm_terms(prob, p).to_instance()


def dual_objective(structure: SvmDualStructure, w: np.ndarray, b: float, lam: np.ndarray) -> float:
    """-w^T w + w^T (X.Y')^T lambda + b Y^T lambda - 1^T lambda, term by term."""
    d = structure.x_hadamard_y.shape[1]
    y = structure.u[d, d + 1:]
    w = np.asarray(w, dtype=float)
    lam = np.asarray(lam, dtype=float)
    return float(
        -(w @ w)
        + w @ (structure.x_hadamard_y.T @ lam)
        + b * (y @ lam)
        - np.sum(lam)
    )


def decode_svm(
    prob: SvmProblem, pm: PrecisionMatrix, bits: Union[Sequence[int], BitVector]
) -> SvmSolution:
    """
    Split the decoded theta into (w, b, lambda) and score it.

    Args:
        prob: Labeled training data
        pm: SVM precision matrix matching prob
        bits: Solver bit vector

    Returns:
        SvmSolution with margins and the dual objective value
    """
    z = as_bits(bits, pm.shape[1])
    theta = pm.decode(z)
    d = prob.d
    w, b, lam = theta[:d], float(theta[d]), theta[d + 1:]
    structure = build_dual_structure(prob)
    return SvmSolution(
        w=w,
        b=b,
        lam=lam,
        margins=prob.y * (prob.x @ w + b),
        dual_objective=dual_objective(structure, w, b, lam),
        bits=bits_to_list(z),
    )


def validate_classifier(sol: SvmSolution, prob: SvmProblem) -> FeasibilityReport:
    margins = prob.y * (prob.x @ np.asarray(sol.w, dtype=float) + sol.b)
    return FeasibilityReport(
        margins=[float(m) for m in margins],
        violations=int(np.sum(margins < 1.0)),
        separated=bool(np.all(margins > 0.0)),
    )


def predict(sol: SvmSolution, x: np.ndarray) -> np.ndarray:
    scores = np.asarray(x, dtype=float) @ sol.w + sol.b
    return np.where(scores >= 0.0, 1.0, -1.0)


def svm_summation_energy(
    prob: SvmProblem, p: PrecisionVector, bits: Union[Sequence[int], BitVector]
) -> float:
    """
    Quadruple-sum expansion of the SVM QUBO objective.

    The dominant term loops over points, features and two precision indices,
    which is the O(N d K^2) construction cost.
    """
    if p.k_plus is None:
        raise ConfigurationError("precision vector has no positive entry")
    n, d, k = prob.n, prob.d, p.k
    pv = p.entries
    pos = [v for v in pv if v > 0]
    kp = len(pos)
    z = as_bits(bits, k * (d + 1) + n * kp)

    def w_hat(j, a):
        return z[j * k + a]

    def b_hat(a):
        return z[d * k + a]

    def lam_hat(i, c):
        return z[(d + 1) * k + i * kp + c]

    energy = 0.0
    for j in range(d):
        for a in range(k):
            for c in range(k):
                energy -= pv[a] * pv[c] * w_hat(j, a) * w_hat(j, c)
    for i in range(n):
        for j in range(d):
            for a in range(k):
                for c in range(kp):
                    energy += prob.x[i, j] * prob.y[i] * pv[a] * pos[c] * w_hat(j, a) * lam_hat(i, c)
    for i in range(n):
        for a in range(k):
            for c in range(kp):
                energy += prob.y[i] * pv[a] * pos[c] * b_hat(a) * lam_hat(i, c)
    for i in range(n):
        for c in range(kp):
            energy -= pos[c] * lam_hat(i, c)
    return float(energy)
