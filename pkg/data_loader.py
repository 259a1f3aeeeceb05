"""CSV ingestion for regression, SVM and k-means training data."""
import csv
import logging
import os
from typing import List, Optional, Tuple

import numpy as np

from errors import IngestionError
from kmeans_formulator import KmeansProblem
from regression_formulator import RegressionProblem
from svm_formulator import SvmProblem

logger = logging.getLogger(__name__)


class DataLoader:
    """Reads numeric CSV files (optional header row) into training problems."""

    def __init__(self, delimiter: str = ","):
        self.delimiter = delimiter

    def read_matrix(self, path: str) -> Tuple[np.ndarray, List[int]]:
        """
        Read a numeric CSV file.

        A first row that does not parse as numbers is treated as a header.

        Args:
            path: Path to the CSV file

        Returns:
            Tuple of (matrix, 1-based file row number of each matrix row)
        """
        if not os.path.exists(path):
            raise IngestionError(f"data file not found: {path}")

        rows: List[List[float]] = []
        line_numbers: List[int] = []
        width: Optional[int] = None
        try:
            with open(path, "r", encoding="utf-8-sig", newline="") as fh:
                for line_no, record in enumerate(csv.reader(fh, delimiter=self.delimiter), start=1):
                    if not record or all(not cell.strip() for cell in record):
                        continue
                    try:
                        values = [float(cell) for cell in record]
                    except ValueError:
                        if not rows and line_no == 1:
                            logger.debug("Treating first row of %s as a header", path)
                            continue
                        raise IngestionError(f"non-numeric value in {record}", row=line_no)
                    if width is None:
                        width = len(values)
                    elif len(values) != width:
                        raise IngestionError(
                            f"expected {width} columns, found {len(values)}", row=line_no
                        )
                    if not all(np.isfinite(values)):
                        raise IngestionError(f"non-finite value in {record}", row=line_no)
                    rows.append(values)
                    line_numbers.append(line_no)
        except (OSError, UnicodeDecodeError, csv.Error) as e:
            raise IngestionError(f"failed to read {path}: {str(e)}")

        if not rows:
            raise IngestionError(f"no data rows in {path}")
        return np.array(rows, dtype=float), line_numbers

    def load_regression(self, path: str) -> RegressionProblem:
        """d feature columns, then one target column."""
        data, _ = self.read_matrix(path)
        if data.shape[1] < 2:
            raise IngestionError(f"regression data needs at least 2 columns, got {data.shape[1]}", row=1)
        try:
            return RegressionProblem(data[:, :-1], data[:, -1])
        except ValueError as e:
            raise IngestionError(str(e))

    def load_svm(self, path: str) -> SvmProblem:
        """
        d feature columns, then one label column with -1/+1.

        0/1 labels are accepted and 0 is remapped to -1.
        """
        data, line_numbers = self.read_matrix(path)
        if data.shape[1] < 2:
            raise IngestionError(f"SVM data needs at least 2 columns, got {data.shape[1]}", row=1)
        labels = data[:, -1].copy()
        for value, line_no in zip(labels, line_numbers):
            if value not in (-1.0, 0.0, 1.0):
                raise IngestionError(f"label {value:g} is not -1/+1 (or 0/1)", row=line_no)
        if np.any(labels == 0.0):
            if np.any(labels == -1.0):
                raise IngestionError("labels mix -1 and 0; use either -1/+1 or 0/1")
            logger.warning("Remapping 0/1 labels in %s to -1/+1", path)
            labels[labels == 0.0] = -1.0
        try:
            return SvmProblem(data[:, :-1], labels)
        except ValueError as e:
            raise IngestionError(str(e))

    def load_kmeans(
        self, path: str, k: int, alpha: Optional[float] = None, beta: Optional[float] = None
    ) -> KmeansProblem:
        """d feature columns per row, no label column."""
        data, _ = self.read_matrix(path)
        try:
            return KmeansProblem(data, k, alpha, beta)
        except ValueError as e:
            raise IngestionError(str(e))
