"""Canonical QUBO instance: minimize z^T A z + z^T b over binary z."""
import json
from dataclasses import InitVar, dataclass
from typing import Dict, List, Sequence, Union

import numpy as np

from errors import ConfigurationError, DimensionMismatchError

BitVector = np.ndarray


def as_bits(z: Union[Sequence[int], np.ndarray], m: int) -> BitVector:
    """
    Validate a binary decision vector against an instance size.

    Args:
        z: Sequence of 0/1 values
        m: Number of binary variables the vector must have

    Returns:
        Read-only int8 array of length m
    """
    bits = np.asarray(z)
    if bits.ndim != 1 or bits.shape[0] != m:
        raise DimensionMismatchError(
            f"bit vector has shape {bits.shape}, expected ({m},)"
        )
    if not np.all((bits == 0) | (bits == 1)):
        raise ValueError("bit vector entries must be 0 or 1")
    bits = bits.astype(np.int8)
    bits.setflags(write=False)
    return bits


def symmetrize(a_raw: np.ndarray) -> np.ndarray:
    """Return (A + A^T) / 2; z^T A z is unchanged for every z."""
    a_raw = np.asarray(a_raw, dtype=float)
    if a_raw.ndim != 2 or a_raw.shape[0] != a_raw.shape[1]:
        raise DimensionMismatchError(f"matrix must be square, got shape {a_raw.shape}")
    if not np.all(np.isfinite(a_raw)):
        raise ValueError("matrix entries must be finite")
    return (a_raw + a_raw.T) / 2.0


@dataclass(frozen=True)
class QuboInstance:
    """
    Dense QUBO with symmetric A (M x M) and linear vector b (M).

    validate=False skips the finiteness, symmetry and copy passes over A; only
    QuboTerms.to_instance uses it, for a matrix it has just symmetrized.
    """

    a: np.ndarray
    b: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatchError(f"A must be square, got shape {a.shape}")
        if a.shape[0] != b.shape[0]:
            raise DimensionMismatchError(
                f"A is {a.shape[0]}x{a.shape[0]} but b has length {b.shape[0]}"
            )
        if a.shape[0] == 0:
            raise DimensionMismatchError("a QUBO needs at least one variable")
        if not np.all(np.isfinite(b)):
            raise ValueError("A and b must contain only finite entries")
        if validate:
            if not np.all(np.isfinite(a)):
                raise ValueError("A and b must contain only finite entries")
            a = a.copy() if np.array_equal(a, a.T) else symmetrize(a)
        b = b.copy()
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_raw(cls, a_raw: np.ndarray, b: np.ndarray) -> "QuboInstance":
        """Build an instance from a possibly non-symmetric matrix."""
        return cls(symmetrize(a_raw), b)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    def scaled(self, factor: float) -> "QuboInstance":
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return QuboInstance(self.a * factor, self.b * factor)

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.a) + np.count_nonzero(self.b))

    def to_dict(self, lossless: bool = True) -> Dict:
        """
        Serialize to the JSON document layout.

        Args:
            lossless: Also emit hex-float fields for a bit-exact round trip

        Returns:
            Dictionary with keys m, a, b (and a_hex, b_hex)
        """
        doc = {
            "m": self.m,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
        }
        if lossless:
            doc["a_hex"] = [[float(v).hex() for v in row] for row in self.a]
            doc["b_hex"] = [float(v).hex() for v in self.b]
        return doc

    @classmethod
    def from_dict(cls, doc: Dict) -> "QuboInstance":
        try:
            if "a_hex" in doc and "b_hex" in doc:
                a = [[float.fromhex(v) for v in row] for row in doc["a_hex"]]
                b = [float.fromhex(v) for v in doc["b_hex"]]
            else:
                a, b = doc["a"], doc["b"]
            instance = cls(np.array(a, dtype=float), np.array(b, dtype=float))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigurationError(f"Malformed QUBO document: {str(e)}")
        declared = doc.get("m", instance.m)
        if isinstance(declared, bool) or not isinstance(declared, (int, np.integer)):
            raise ConfigurationError(f"Malformed QUBO document: m must be an integer, got {declared!r}")
        if declared != instance.m:
            raise ConfigurationError(
                f"QUBO document declares m={doc['m']} but A is {instance.m}x{instance.m}"
            )
        return instance

    def save(self, path: str):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "QuboInstance":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class QuboTerms:
    """
    A QUBO in coordinate form: A_raw[rows[t], cols[t]] += values[t], plus b.

    Formulators assemble these terms in time proportional to their count;
    to_instance() is the single dense pass.
    """

    m: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        m = int(self.m)
        rows = np.asarray(self.rows, dtype=np.int64).reshape(-1)
        cols = np.asarray(self.cols, dtype=np.int64).reshape(-1)
        values = np.asarray(self.values, dtype=float).reshape(-1)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if m < 1:
            raise DimensionMismatchError("a QUBO needs at least one variable")
        if not rows.shape == cols.shape == values.shape:
            raise DimensionMismatchError(
                f"term arrays differ in length: {rows.shape[0]}, {cols.shape[0]}, {values.shape[0]}"
            )
        if b.shape[0] != m:
            raise DimensionMismatchError(f"b has length {b.shape[0]}, expected {m}")
        if rows.size and (min(rows.min(), cols.min()) < 0 or max(rows.max(), cols.max()) >= m):
            raise DimensionMismatchError(f"term index outside 0..{m - 1}")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(b))):
            raise ValueError("QUBO terms must be finite")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "b", b)

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    def to_instance(self) -> QuboInstance:
        """
        Dense symmetric A = (A_raw + A_raw^T) / 2.

        Each term adds half its value at (row, col) and half at (col, row);
        np.add.at accumulates repeated coordinates.
        """
        a = np.zeros((self.m, self.m))
        half = self.values / 2.0
        np.add.at(a, (self.rows, self.cols), half)
        np.add.at(a, (self.cols, self.rows), half)
        return QuboInstance(a, self.b, validate=False)


def evaluate(q: QuboInstance, z: Union[Sequence[int], np.ndarray]) -> float:
    """Objective z^T A z + z^T b in double precision."""
    bits = as_bits(z, q.m).astype(float)
    return float(bits @ q.a @ bits + bits @ q.b)


def evaluate_many(q: QuboInstance, z_batch: np.ndarray) -> np.ndarray:
    """
    Energies of a batch of bit vectors.

    Args:
        q: QUBO instance
        z_batch: Array of shape (S, M) with 0/1 entries

    Returns:
        Array of S energies
    """
    z = np.asarray(z_batch, dtype=float)
    if z.ndim != 2 or z.shape[1] != q.m:
        raise DimensionMismatchError(
            f"batch has shape {z.shape}, expected (S, {q.m})"
        )
    return np.einsum("ij,ij->i", z @ q.a, z) + z @ q.b


def index_to_bits(indices: np.ndarray, m: int) -> np.ndarray:
    """Map integers to bit rows, most significant bit first (lexicographic order)."""
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    return ((np.asarray(indices, dtype=np.int64)[:, None] >> shifts) & 1).astype(np.int8)


def bits_to_list(bits: np.ndarray) -> List[int]:
    return [int(v) for v in bits]
