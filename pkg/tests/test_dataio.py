import numpy as np
import pytest

from rpcscreen.dataio import Table, read_csv_matrix, write_csv_matrix
from rpcscreen.errors import DataValidationError, InputFileError, InvalidArgumentError


def put(tmp_path, text, name="m.csv", newline="\n"):
    path = tmp_path / name
    path.write_bytes(text.replace("\n", newline).encode())
    return path


def test_plain(tmp_path):
    t = read_csv_matrix(put(tmp_path, "1,2\n3,4.5\n"))
    assert t.names is None
    np.testing.assert_array_equal(t.values, [[1, 2], [3, 4.5]])


def test_header_and_crlf(tmp_path):
    t = read_csv_matrix(put(tmp_path, "a,b\n1,2\n\n3,4\n", newline="\r\n"))
    assert t.names == ["a", "b"]
    assert t.values.shape == (2, 2)
    assert t.column("b") == 1 and t.column("0") == 0


def test_numeric_header_is_data(tmp_path):
    assert read_csv_matrix(put(tmp_path, "1e3,-2\n3,4\n")).values[0, 0] == 1000.0


def test_column_errors():
    t = Table(np.zeros((2, 2)), ["a", "b"])
    with pytest.raises(InvalidArgumentError):
        t.column("c")
    with pytest.raises(InvalidArgumentError):
        t.column("5")


def test_missing(tmp_path):
    with pytest.raises(InputFileError):
        read_csv_matrix(tmp_path / "nope.csv")


def test_ragged(tmp_path):
    with pytest.raises(DataValidationError) as exc:
        read_csv_matrix(put(tmp_path, "1,2\n3\n"))
    assert exc.value.row == 2


@pytest.mark.parametrize("cell", ["x", "nan", "inf", ""])
def test_bad_cell(tmp_path, cell):
    with pytest.raises(DataValidationError) as exc:
        read_csv_matrix(put(tmp_path, f"a,b\n1,2\n3,{cell}\n"))
    assert (exc.value.row, exc.value.col) == (3, 2)
    assert "line 3, column 2" in str(exc.value)


@pytest.mark.parametrize("text", ["", "\n\n", "a,b\n"])
def test_empty(tmp_path, text):
    with pytest.raises(DataValidationError):
        read_csv_matrix(put(tmp_path, text))


def test_round_trip(tmp_path):
    v = np.random.default_rng(0).standard_normal((4, 3))
    path = tmp_path / "r.csv"
    write_csv_matrix(path, v, ["a", "b", "c"])
    t = read_csv_matrix(path)
    assert t.names == ["a", "b", "c"]
    assert np.array_equal(t.values, v)
