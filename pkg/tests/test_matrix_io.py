import numpy as np
import pytest
from numpy.testing import assert_array_equal

from exceptions import MatrixFormatError
from services.matrix_io import format_matrix, read_matrix, read_weight_csv, write_matrix, write_weight_csv


def test_matrix_file_is_bit_exact(tmp_path, rng):
    M = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    M[0, 0] = 1 / 3
    path = write_matrix(tmp_path / "m.mat", M)
    assert_array_equal(read_matrix(path), M)
    assert path.read_text().splitlines()[0] == "3 2"


def test_format_matrix_layout():
    assert format_matrix([[1, 2j]]) == "1 2\n1.0 0.0\n0.0 2.0\n"
    with pytest.raises(ValueError):
        format_matrix([1, 2])


@pytest.mark.parametrize(
    "text",
    [
        "",
        "2\n1 0\n",
        "two two\n1 0\n",
        "0 1\n",
        "1 2\n1 0\n",
        "1 1\n1 x\n",
        "1 1\n1 0 0\n",
        "1 1\nnan 0\n",
    ],
    ids=["empty", "short-header", "text-header", "zero-rows", "missing-entry", "bad-number", "three-columns", "nan"],
)
def test_malformed_matrix(tmp_path, text):
    path = tmp_path / "bad.mat"
    path.write_text(text)
    with pytest.raises(MatrixFormatError):
        read_matrix(path)


def test_missing_matrix_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_matrix(tmp_path / "absent.mat")


def test_weight_csv_roundtrip(tmp_path):
    s = np.arange(8) / 64
    values = np.sqrt(1 + s)
    path = write_weight_csv(tmp_path / "w.csv", s, values)
    assert path.read_text().startswith("s,value\n")
    s_back, values_back = read_weight_csv(path)
    assert_array_equal(s_back, s)
    assert_array_equal(values_back, values)


@pytest.mark.parametrize(
    "text",
    ["", "0,1\n0.5,2\n", "s,value,extra\n0,1,2\n", "s,value\n0,abc\n", "s\n0\n"],
    ids=["empty", "no-header", "three-columns", "non-numeric", "one-column"],
)
def test_malformed_weight_csv(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(MatrixFormatError):
        read_weight_csv(path)
