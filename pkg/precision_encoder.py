"""Precision-vector binary encoding of real parameters (w = P_matrix @ w_hat)."""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from config import QUBO_DEFAULT_PRECISION
from errors import ConfigurationError, DimensionMismatchError
from qubo import BitVector, as_bits, index_to_bits


def _is_power_of_two(value: Fraction) -> bool:
    mag = abs(value)
    num, den = mag.numerator, mag.denominator
    if num == 0:
        return False
    if den == 1:
        return num & (num - 1) == 0
    return num == 1 and den & (den - 1) == 0


def parse_precision(spec: Union[str, Sequence[str]]) -> "PrecisionVector":
    """
    Parse precision entries given as strings, exactly.

    Each entry must be sign x 2^n; decimals ("-0.5") and fractions ("1/4")
    are parsed as exact rationals, so no float rounding can sneak a
    non-power-of-two through.

    Args:
        spec: Comma-separated string or sequence of entry strings

    Returns:
        PrecisionVector with entries sorted ascending
    """
    items = spec.split(",") if isinstance(spec, str) else list(spec)
    values = []
    for raw in items:
        text = str(raw).strip()
        if not text:
            continue
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ConfigurationError(f"precision entry {text!r} is not a number")
        if not _is_power_of_two(value):
            raise ConfigurationError(
                f"precision entry {text!r} is not a signed power of two"
            )
        values.append(float(value))
    if not values:
        raise ConfigurationError("precision vector must have at least one entry")
    if len(set(values)) != len(values):
        raise ConfigurationError(f"precision vector has duplicate entries: {items}")
    return PrecisionVector(tuple(sorted(values)))


def default_precision() -> "PrecisionVector":
    return parse_precision(QUBO_DEFAULT_PRECISION)


def format_entry(value: float) -> str:
    return f"{value:g}"


@dataclass(frozen=True)
class PrecisionVector:
    """Sorted signed powers of two; bit-selected subset sums are representable values."""

    entries: Tuple[float, ...]

    def __post_init__(self):
        entries = tuple(float(v) for v in self.entries)
        if not entries:
            raise ConfigurationError("precision vector must have at least one entry")
        for v in entries:
            if v == 0 or not np.isfinite(v):
                raise ConfigurationError(f"precision entry {v} must be a nonzero power of two")
            mantissa, _ = np.frexp(abs(v))
            if mantissa != 0.5:
                raise ConfigurationError(f"precision entry {v} is not a signed power of two")
        if any(b <= a for a, b in zip(entries, entries[1:])):
            raise ConfigurationError(
                f"precision entries must be strictly ascending without duplicates: {entries}"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def k_plus(self) -> Optional[int]:
        """1-based index of the smallest positive entry, None if all are negative."""
        for idx, v in enumerate(self.entries, start=1):
            if v > 0:
                return idx
        return None

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    @property
    def positive(self) -> np.ndarray:
        """P_plus: the positive entries only."""
        return np.array([v for v in self.entries if v > 0], dtype=float)

    def strings(self) -> List[str]:
        return [format_entry(v) for v in self.entries]


def representable_values(p: PrecisionVector) -> np.ndarray:
    """All distinct subset sums of the precision entries, ascending."""
    subsets = index_to_bits(np.arange(1 << p.k), p.k).astype(float)
    return np.unique(subsets @ p.array)


def nonzero_entries(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(rows, cols, values) of the nonzero entries of a dense matrix, row-major."""
    u = np.asarray(u, dtype=float)
    rows, cols = np.nonzero(u)
    return rows, cols, u[rows, cols]


@dataclass(frozen=True)
class PrecisionBlock:
    """count parameters, each encoded with the same precision vector."""

    count: int
    vector: Tuple[float, ...]

    @property
    def width(self) -> int:
        return len(self.vector)


class PrecisionMatrix:
    """
    Block-diagonal precision matrix diag(I_{n1} (x) v1^T, I_{n2} (x) v2^T, ...).

    Formulators use the block structure for P^T U P and P^T v; the dense
    realization is built lazily for oracle checks.
    """

    def __init__(self, blocks: Sequence[PrecisionBlock]):
        if not blocks:
            raise ValueError("a precision matrix needs at least one block")
        self.blocks: Tuple[PrecisionBlock, ...] = tuple(blocks)
        self._row_offsets = np.cumsum([0] + [blk.count for blk in self.blocks])
        self._col_offsets = np.cumsum([0] + [blk.count * blk.width for blk in self.blocks])

    @property
    def shape(self) -> Tuple[int, int]:
        return int(self._row_offsets[-1]), int(self._col_offsets[-1])

    @cached_property
    def dense(self) -> np.ndarray:
        rows, cols = self.shape
        out = np.zeros((rows, cols))
        for i, blk in enumerate(self.blocks):
            r0, r1 = self._row_offsets[i], self._row_offsets[i + 1]
            c0, c1 = self._col_offsets[i], self._col_offsets[i + 1]
            out[r0:r1, c0:c1] = np.kron(np.eye(blk.count), np.array(blk.vector)[None, :])
        out.setflags(write=False)
        return out

    def decode(self, bits: Union[Sequence[int], BitVector]) -> np.ndarray:
        """Real parameters P_matrix @ bits, component i = sum_k p_k * bit_ik."""
        z = as_bits(bits, self.shape[1]).astype(float)
        parts = []
        for i, blk in enumerate(self.blocks):
            c0, c1 = self._col_offsets[i], self._col_offsets[i + 1]
            parts.append(z[c0:c1].reshape(blk.count, blk.width) @ np.array(blk.vector))
        return np.concatenate(parts)

    def encode_nearest(self, w: Sequence[float]) -> BitVector:
        """
        Bits whose decoded value is closest to w, component by component.

        Ties go to the lexicographically smallest bit pattern.
        """
        target = np.asarray(w, dtype=float).reshape(-1)
        if target.shape[0] != self.shape[0]:
            raise DimensionMismatchError(
                f"target has length {target.shape[0]}, expected {self.shape[0]}"
            )
        out = []
        for i, blk in enumerate(self.blocks):
            patterns = index_to_bits(np.arange(1 << blk.width), blk.width)
            sums = patterns.astype(float) @ np.array(blk.vector)
            r0 = self._row_offsets[i]
            for j in range(blk.count):
                # argmin returns the first, i.e. lexicographically smallest, pattern
                out.append(patterns[int(np.argmin(np.abs(sums - target[r0 + j])))])
        return as_bits(np.concatenate(out), self.shape[1])

    def congruence_terms(
        self, rows: np.ndarray, cols: np.ndarray, values: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Expand parameter-space entries U[r, s] into bit-space terms of P^T U P.

        Each entry becomes the |v_r| x |v_s| block U[r, s] * v_r v_s^T placed
        at the bits of parameters r and s, so the cost is the number of entries
        times the block sizes.

        Args:
            rows: Parameter row index of each entry
            cols: Parameter column index of each entry
            values: Entry values

        Returns:
            Tuple of (bit rows, bit columns, values); unique when the input is
        """
        rows = np.asarray(rows, dtype=np.int64).reshape(-1)
        cols = np.asarray(cols, dtype=np.int64).reshape(-1)
        values = np.asarray(values, dtype=float).reshape(-1)
        n_params = self.shape[0]
        if rows.size and (min(rows.min(), cols.min()) < 0 or max(rows.max(), cols.max()) >= n_params):
            raise DimensionMismatchError(f"parameter index outside 0..{n_params - 1}")
        row_block = np.searchsorted(self._row_offsets, rows, side="right") - 1
        col_block = np.searchsorted(self._row_offsets, cols, side="right") - 1
        out_rows, out_cols, out_values = [], [], []
        for i, bi in enumerate(self.blocks):
            vi = np.array(bi.vector)
            for j, bj in enumerate(self.blocks):
                sel = (row_block == i) & (col_block == j)
                if not np.any(sel):
                    continue
                vj = np.array(bj.vector)
                shape = (int(np.count_nonzero(sel)), bi.width, bj.width)
                first_r = self._col_offsets[i] + (rows[sel] - self._row_offsets[i]) * bi.width
                first_c = self._col_offsets[j] + (cols[sel] - self._row_offsets[j]) * bj.width
                out_rows.append(np.broadcast_to(
                    first_r[:, None, None] + np.arange(bi.width)[None, :, None], shape
                ).reshape(-1))
                out_cols.append(np.broadcast_to(
                    first_c[:, None, None] + np.arange(bj.width)[None, None, :], shape
                ).reshape(-1))
                out_values.append((values[sel][:, None, None] * np.outer(vi, vj)[None, :, :]).reshape(-1))
        if not out_values:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), np.zeros(0)
        return np.concatenate(out_rows), np.concatenate(out_cols), np.concatenate(out_values)

    def congruence(self, u: np.ndarray) -> np.ndarray:
        """Dense P^T U P, built from congruence_terms over the nonzeros of U."""
        u = np.asarray(u, dtype=float)
        rows, cols = self.shape
        if u.shape != (rows, rows):
            raise DimensionMismatchError(f"U has shape {u.shape}, expected ({rows}, {rows})")
        bit_rows, bit_cols, values = self.congruence_terms(*nonzero_entries(u))
        out = np.zeros((cols, cols))
        out[bit_rows, bit_cols] = values
        return out

    def transpose_apply(self, v: np.ndarray) -> np.ndarray:
        """P^T v assembled block-wise."""
        v = np.asarray(v, dtype=float).reshape(-1)
        if v.shape[0] != self.shape[0]:
            raise DimensionMismatchError(f"v has length {v.shape[0]}, expected {self.shape[0]}")
        parts = []
        for i, blk in enumerate(self.blocks):
            parts.append(np.kron(v[self._row_offsets[i]:self._row_offsets[i + 1]], np.array(blk.vector)))
        return np.concatenate(parts)

    def labels(self, names: Sequence[str]) -> List[str]:
        """Legend label per bit index, e.g. "w[0]@p=0.5"."""
        if len(names) != self.shape[0]:
            raise DimensionMismatchError(f"got {len(names)} names for {self.shape[0]} parameters")
        out = []
        for i, blk in enumerate(self.blocks):
            for j in range(blk.count):
                name = names[self._row_offsets[i] + j]
                out.extend(f"{name}@p={format_entry(v)}" for v in blk.vector)
        return out


def build_regression_precision_matrix(p: PrecisionVector, d: int) -> PrecisionMatrix:
    """I_{d+1} (x) P^T, shape (d+1) x K(d+1)."""
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d}")
    return PrecisionMatrix([PrecisionBlock(d + 1, p.entries)])


def build_svm_precision_matrix(p: PrecisionVector, d: int, n: int) -> PrecisionMatrix:
    """
    Stacked precision matrix for theta = [w; b; lambda].

    Top-left block I_{d+1} (x) P^T, bottom-right I_n (x) P_plus^T; shape
    (n + d + 1) x (K(d+1) + n(K - K_plus + 1)).
    """
    if d < 1 or n < 1:
        raise ValueError(f"d and n must be at least 1, got d={d}, n={n}")
    if p.k_plus is None:
        raise ConfigurationError(
            f"precision vector {p.strings()} has no positive entry; "
            "nonnegative Lagrange multipliers cannot be encoded"
        )
    return PrecisionMatrix([
        PrecisionBlock(d + 1, p.entries),
        PrecisionBlock(n, tuple(float(v) for v in p.positive)),
    ])


def decode(pm: PrecisionMatrix, bits: Union[Sequence[int], BitVector]) -> np.ndarray:
    return pm.decode(bits)


def encode_nearest(pm: PrecisionMatrix, w: Sequence[float]) -> BitVector:
    return pm.encode_nearest(w)
