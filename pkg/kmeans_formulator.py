"""Equal-size k-means clustering as a QUBO with size and assignment penalties."""
import logging
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import DimensionMismatchError
from qubo import BitVector, QuboInstance, QuboTerms, as_bits, evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KmeansProblem:
    """
    Points X (N x d) to split into k clusters of about N/k points.

    alpha weights the cluster-size penalty and beta the one-cluster-per-point
    penalty. Leave them as None to use suggest_penalties().
    """

    x: np.ndarray
    k: int
    alpha: Optional[float] = None
    beta: Optional[float] = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise DimensionMismatchError(f"X must be a non-empty matrix, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("clustering data must be finite")
        k = int(self.k)
        if not 2 <= k <= x.shape[0]:
            raise ValueError(f"need 2 <= k <= N, got k={k} with N={x.shape[0]}")
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if value is not None and not (np.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be a finite value >= 0, got {value}")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "k", k)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def with_penalties(self, alpha: float, beta: float) -> "KmeansProblem":
        return KmeansProblem(self.x, self.k, alpha, beta)

    def resolved(self) -> "KmeansProblem":
        """Problem with any missing penalty filled from suggest_penalties()."""
        if self.alpha is not None and self.beta is not None:
            return self
        alpha, beta = suggest_penalties(self)
        return self.with_penalties(
            self.alpha if self.alpha is not None else alpha,
            self.beta if self.beta is not None else beta,
        )

    def size_bounds(self) -> Tuple[int, int]:
        return self.n // self.k, -(-self.n // self.k)


@dataclass(frozen=True)
class AssignmentMatrix:
    """N x k binary matrix W_hat; w_hat stacks columns, v_hat stacks rows."""

    bits: np.ndarray

    @property
    def column_stacked(self) -> np.ndarray:
        return self.bits.T.reshape(-1)

    @property
    def row_stacked(self) -> np.ndarray:
        return self.bits.reshape(-1)

    def labels(self) -> List[Optional[int]]:
        """Cluster index per point, None where a row is not exactly one-hot."""
        return [int(np.argmax(row)) if row.sum() == 1 else None for row in self.bits]


@dataclass(frozen=True)
class KmeansDecoded:
    assignment: AssignmentMatrix
    row_sums: List[int]
    column_sums: List[int]
    row_violations: int
    column_deviations: List[float]
    feasible: bool
    cost: float
    qubo_energy: Optional[float] = None

    def to_dict(self) -> Dict:
        return {
            "assignment": self.assignment.bits.tolist(),
            "labels": self.assignment.labels(),
            "row_sums": self.row_sums,
            "column_sums": self.column_sums,
            "row_violations": self.row_violations,
            "column_deviations": self.column_deviations,
            "feasible": self.feasible,
            "cost": self.cost,
            "qubo_energy": self.qubo_energy,
        }


def build_distance_matrix(prob: KmeansProblem) -> np.ndarray:
    """Squared Euclidean distances d_ij = ||x_i - x_j||^2 (N x N)."""
    diff = prob.x[:, None, :] - prob.x[None, :, :]
    dist = np.einsum("ijm,ijm->ij", diff, diff)
    dist.setflags(write=False)
    return dist


def permutation_indices(n: int, k: int) -> np.ndarray:
    """Column of the single 1 in each row of Q (0-based): N * (r mod k) + r // k."""
    if n < 1 or k < 1:
        raise ValueError(f"n and k must be positive, got n={n}, k={k}")
    rows = np.arange(n * k)
    return n * (rows % k) + rows // k


def build_permutation(n: int, k: int) -> np.ndarray:
    """
    Permutation Q with Q @ w_hat (column-stacked) = v_hat (row-stacked).

    Args:
        n: Number of points
        k: Number of clusters

    Returns:
        (n*k) x (n*k) 0/1 matrix with exactly one 1 per row and column
    """
    cols = permutation_indices(n, k)
    q = np.zeros((n * k, n * k), dtype=np.int8)
    q[np.arange(n * k), cols] = 1
    return q


def penalty_matrices(n: int, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """F = J_N - (2N/k) I_N and G = J_k - 2 I_k (J is the all-ones matrix)."""
    f = np.ones((n, n)) - (2.0 * n / k) * np.eye(n)
    g = np.ones((k, k)) - 2.0 * np.eye(k)
    return f, g


def suggest_penalties(prob: KmeansProblem) -> Tuple[float, float]:
    """alpha = beta = N * max(D) + 1."""
    value = prob.n * float(np.max(build_distance_matrix(prob))) + 1.0
    return value, value


def restored_constant(prob: KmeansProblem) -> float:
    """alpha * k * (N/k)^2 + beta * N, the constants dropped from the penalties."""
    prob = prob.resolved()
    return prob.alpha * prob.k * (prob.n / prob.k) ** 2 + prob.beta * prob.n


def kmeans_terms(prob: KmeansProblem) -> QuboTerms:
    """
    Terms of A = I_k (x) (D + alpha F) + Q^T (I_N (x) beta G) Q, b = 0.

    Variables follow column stacking: index j*N + i is point i in cluster j.
    The Q^T (I_N (x) beta G) Q part only couples the k bits of one point;
    its diagonal falls on the diagonal of the cluster blocks and is folded
    into them, so no coordinate repeats. k N^2 + N k(k-1) terms in all.
    """
    prob = prob.resolved()
    n, k = prob.n, prob.k
    f, g = penalty_matrices(n, k)
    block = build_distance_matrix(prob) + prob.alpha * f
    ii, jj = np.indices((n, n)).reshape(2, -1)
    offsets = n * np.arange(k)
    block_values = np.broadcast_to(block.reshape(-1), (k, n * n)).copy()
    block_values[:, ii == jj] += prob.beta * np.diag(g)[:, None]

    # distinct clusters c != l, each pair repeated for every point
    c, l = np.nonzero(~np.eye(k, dtype=bool))
    points = np.arange(n)
    rows = np.concatenate([
        (offsets[:, None] + ii[None, :]).reshape(-1),
        (n * c[:, None] + points[None, :]).reshape(-1),
    ])
    cols = np.concatenate([
        (offsets[:, None] + jj[None, :]).reshape(-1),
        (n * l[:, None] + points[None, :]).reshape(-1),
    ])
    values = np.concatenate([block_values.reshape(-1), np.repeat(prob.beta * g[c, l], n)])
    logger.debug("k-means QUBO: N=%d k=%d alpha=%g beta=%g", n, k, prob.alpha, prob.beta)
    return QuboTerms(n * k, rows, cols, values, np.zeros(n * k))


def formulate_kmeans(prob: KmeansProblem) -> QuboInstance:
    """
    Build the equal-size k-means QUBO.

    Args:
        prob: Clustering problem; missing penalties default to suggest_penalties()

    Returns:
        QuboInstance with M = N * k variables
    """
    return kmeans_terms(prob).to_instance()


def assignment_from_bits(n: int, k: int, bits: Union[Sequence[int], BitVector]) -> AssignmentMatrix:
    z = as_bits(bits, n * k)
    matrix = np.asarray(z, dtype=np.int8).reshape(k, n).T.copy()
    matrix.setflags(write=False)
    return AssignmentMatrix(matrix)


def bits_from_labels(labels: Sequence[int], k: int) -> np.ndarray:
    """Column-stacked bit vector for a cluster label per point."""
    n = len(labels)
    z = np.zeros(n * k, dtype=np.int8)
    for i, c in enumerate(labels):
        z[int(c) * n + i] = 1
    return z


def within_cluster_cost(dist: np.ndarray, assignment: AssignmentMatrix) -> float:
    """sum_j w'_j^T D w'_j (each unordered pair counted twice)."""
    w = assignment.bits.astype(float)
    return float(np.sum(w * (dist @ w)))


def decode_kmeans(
    prob: KmeansProblem, bits: Union[Sequence[int], BitVector], qubo: Optional[QuboInstance] = None
) -> KmeansDecoded:
    """
    Reshape bits into W_hat and report feasibility and within-cluster cost.

    Infeasible assignments are reported, not rejected.
    """
    assignment = assignment_from_bits(prob.n, prob.k, bits)
    row_sums = assignment.bits.sum(axis=1)
    col_sums = assignment.bits.sum(axis=0)
    lo, hi = prob.size_bounds()
    target = prob.n / prob.k
    row_violations = int(np.sum(row_sums != 1))
    feasible = row_violations == 0 and bool(np.all((col_sums >= lo) & (col_sums <= hi)))
    dist = build_distance_matrix(prob)
    return KmeansDecoded(
        assignment=assignment,
        row_sums=[int(v) for v in row_sums],
        column_sums=[int(v) for v in col_sums],
        row_violations=row_violations,
        column_deviations=[float(c - target) for c in col_sums],
        feasible=feasible,
        cost=within_cluster_cost(dist, assignment),
        qubo_energy=evaluate(qubo, bits) if qubo is not None else None,
    )


def penalty_form_energy(prob: KmeansProblem, bits: Union[Sequence[int], BitVector]) -> float:
    """
    Objective plus penalties with constants kept:
    sum_j [w'_j^T D w'_j + alpha (colsum_j - N/k)^2] + beta sum_i (rowsum_i - 1)^2.
    """
    prob = prob.resolved()
    assignment = assignment_from_bits(prob.n, prob.k, bits)
    dist = build_distance_matrix(prob)
    cols = assignment.bits.sum(axis=0).astype(float)
    rows = assignment.bits.sum(axis=1).astype(float)
    return (
        within_cluster_cost(dist, assignment)
        + prob.alpha * float(np.sum((cols - prob.n / prob.k) ** 2))
        + prob.beta * float(np.sum((rows - 1.0) ** 2))
    )


def kmeans_summation_energy(prob: KmeansProblem, bits: Union[Sequence[int], BitVector]) -> float:
    """Loop-by-loop expansion: per-coordinate distance term, F term and G term."""
    prob = prob.resolved()
    n, k, d = prob.n, prob.k, prob.d
    w = assignment_from_bits(n, k, bits).bits
    f, g = penalty_matrices(n, k)
    x = prob.x
    energy = 0.0
    for c in range(k):
        for j in range(n):
            for i in range(n):
                if w[i, c] and w[j, c]:
                    for m in range(d):
                        energy += (x[i, m] - x[j, m]) ** 2
                    energy += prob.alpha * f[i, j]
    for p in range(n):
        for j in range(k):
            for i in range(k):
                energy += prob.beta * w[p, i] * g[i, j] * w[p, j]
    return float(energy)


def weighted_kmeans_cost(x: np.ndarray, labels: Sequence[int]) -> float:
    """Generic k-means objective sum_i 1/(2|phi_i|) sum_{x,y in phi_i} ||x - y||^2."""
    x = np.asarray(x, dtype=float)
    labels = np.asarray(labels)
    total = 0.0
    for c in np.unique(labels):
        members = x[labels == c]
        diff = members[:, None, :] - members[None, :, :]
        total += float(np.sum(diff * diff)) / (2.0 * len(members))
    return total


def relabelings(labels: Sequence[int], k: int) -> List[Tuple[int, ...]]:
    """All k! relabelings of a cluster assignment."""
    return sorted({tuple(perm[c] for c in labels) for perm in permutations(range(k))})
