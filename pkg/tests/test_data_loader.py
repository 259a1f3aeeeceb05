"""Unit tests for DataLoader."""
import logging

import numpy as np
import pytest

from data_loader import DataLoader
from errors import IngestionError


class TestDataLoader:
    """Test cases for DataLoader."""

    @pytest.fixture
    def loader(self):
        """Create a DataLoader instance for testing."""
        return DataLoader()

    @pytest.fixture
    def write_csv(self, tmp_path):
        def _write(name, text):
            path = tmp_path / name
            path.write_text(text)
            return str(path)
        return _write

    def test_read_matrix_with_header(self, loader, write_csv):
        path = write_csv("data.csv", "x,y\n1,2\n\n3,4\n")
        matrix, rows = loader.read_matrix(path)

        np.testing.assert_array_equal(matrix, [[1.0, 2.0], [3.0, 4.0]])
        assert rows == [2, 4]

    def test_utf8_bom_is_not_a_header(self, loader, tmp_path):
        path = tmp_path / "bom.csv"
        path.write_bytes(b"\xef\xbb\xbf1,2\n3,4\n")
        matrix, rows = loader.read_matrix(str(path))

        np.testing.assert_array_equal(matrix, [[1.0, 2.0], [3.0, 4.0]])
        assert rows == [1, 2]

    def test_utf8_bom_before_header(self, loader, tmp_path):
        path = tmp_path / "bom_header.csv"
        path.write_bytes("\ufeffx,y\n1,2\n".encode("utf-8"))
        matrix, rows = loader.read_matrix(str(path))

        np.testing.assert_array_equal(matrix, [[1.0, 2.0]])
        assert rows == [2]

    def test_missing_file(self, loader, tmp_path):
        with pytest.raises(IngestionError) as excinfo:
            loader.read_matrix(str(tmp_path / "nope.csv"))
        assert "not found" in str(excinfo.value)

    def test_non_numeric_row_reports_row_number(self, loader, write_csv):
        path = write_csv("bad.csv", "1,2\n3,oops\n")
        with pytest.raises(IngestionError) as excinfo:
            loader.read_matrix(path)
        assert excinfo.value.row == 2
        assert str(excinfo.value).startswith("row 2:")

    def test_ragged_row(self, loader, write_csv):
        path = write_csv("ragged.csv", "1,2\n3,4,5\n")
        with pytest.raises(IngestionError) as excinfo:
            loader.read_matrix(path)
        assert excinfo.value.row == 2

    def test_non_finite_value(self, loader, write_csv):
        path = write_csv("inf.csv", "1,2\n3,inf\n")
        with pytest.raises(IngestionError):
            loader.read_matrix(path)

    def test_header_only(self, loader, write_csv):
        with pytest.raises(IngestionError):
            loader.read_matrix(write_csv("empty.csv", "a,b\n"))

    def test_load_regression(self, loader, write_csv):
        prob = loader.load_regression(write_csv("reg.csv", "x,y\n1,1\n2,2\n"))
        assert prob.n == 2
        assert prob.d == 1
        np.testing.assert_array_equal(prob.y, [1.0, 2.0])

    def test_load_regression_needs_target(self, loader, write_csv):
        with pytest.raises(IngestionError):
            loader.load_regression(write_csv("one.csv", "1\n2\n"))

    def test_load_svm_signed_labels(self, loader, write_csv):
        prob = loader.load_svm(write_csv("svm.csv", "1,1\n-1,-1\n"))
        np.testing.assert_array_equal(prob.y, [1.0, -1.0])

    def test_load_svm_remaps_zero_labels(self, loader, write_csv, caplog):
        path = write_csv("svm01.csv", "1,1\n-1,0\n")
        with caplog.at_level(logging.WARNING, logger="data_loader"):
            prob = loader.load_svm(path)
        np.testing.assert_array_equal(prob.y, [1.0, -1.0])
        assert "Remapping" in caplog.text

    def test_load_svm_bad_label_row(self, loader, write_csv):
        with pytest.raises(IngestionError) as excinfo:
            loader.load_svm(write_csv("svm_bad.csv", "f,label\n1,1\n2,2\n"))
        assert excinfo.value.row == 3

    def test_load_svm_mixed_encodings(self, loader, write_csv):
        with pytest.raises(IngestionError):
            loader.load_svm(write_csv("mixed.csv", "1,1\n2,0\n3,-1\n"))

    def test_load_svm_single_class(self, loader, write_csv):
        with pytest.raises(IngestionError):
            loader.load_svm(write_csv("single.csv", "1,1\n2,1\n"))

    def test_load_kmeans(self, loader, write_csv):
        prob = loader.load_kmeans(write_csv("km.csv", "0\n0.1\n10\n10.1\n"), 2)
        assert prob.n == 4
        assert prob.alpha is None

    def test_load_kmeans_too_many_clusters(self, loader, write_csv):
        with pytest.raises(IngestionError):
            loader.load_kmeans(write_csv("km_small.csv", "0\n1\n"), 3)
