import numpy as np
import pytest

from magnon_benchkit.columnar import ColumnarOutput, DataFormatError, read_columnar


def _table():
    return ColumnarOutput.from_columns(
        [("freq", "GHz"), ("power", "1")],
        [[7.8, 7.9, 8.0], [0.5, 0.25, 1.0 / 3.0]],
        ["synthetic"],
    )


def test_text_layout():
    text = _table().to_text()
    lines = text.splitlines()
    assert lines[0] == "# freq(GHz), power(1)"
    assert lines[1] == "# synthetic"
    assert lines[2] == "7.8,0.5"
    assert lines[4] == "8,0.333333333333"


def test_file_round_trip(tmp_path):
    path = _table().write(tmp_path / "sub" / "out.csv")
    back = read_columnar(path)
    assert back.columns == (("freq", "GHz"), ("power", "1"))
    assert back.comments == ("synthetic",)
    np.testing.assert_allclose(back.column("power"), [0.5, 0.25, 1.0 / 3.0], rtol=1e-11)
    assert path.read_bytes() == _table().to_text().encode()


def test_unknown_column():
    with pytest.raises(KeyError):
        _table().column("phase")


def test_ragged_rows_rejected():
    with pytest.raises(ValueError):
        ColumnarOutput((("a", "1"), ("b", "1")), np.zeros((2, 3)))


@pytest.mark.parametrize(
    "text, line, message",
    [
        ("1,2\n", 1, "missing header"),
        ("# freq GHz\n1\n", 1, "is not name"),
        ("# a(1), b(1)\n1,2\n3\n", 3, "expected 2 columns"),
        ("# a(1), b(1)\n1,x\n", 2, "non-numeric"),
        ("# a(1), b(1)\n# only comments\n", 2, "no data rows"),
    ],
)
def test_malformed_files(tmp_path, text, line, message):
    path = tmp_path / "bad.csv"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(DataFormatError, match=message) as info:
        read_columnar(path)
    assert info.value.line == line
    assert str(path) in str(info.value)
