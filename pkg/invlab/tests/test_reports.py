import json

import numpy as np

from invlab import __version__
from invlab.schemas import CheckOut
from invlab.utils.reports import metadata_line, read_csv, status_line, write_csv, write_summary

ROWS = [
    {"j": np.int64(1), "value": np.float64(1.0 / 3.0), "point": (0.5, -1.0), "pass": np.bool_(True)},
    {"j": 2, "value": 2.5e-17, "point": (1.0, 0.0), "pass": False},
]


def test_csv_has_header_rows_and_trailer(tmp_path):
    path = write_csv(tmp_path / "out" / "t.csv", ROWS, "abc123def456")
    lines = path.read_text().splitlines()
    assert lines[0] == "j,value,point,pass"
    assert lines[1] == "1,0.333333333333,0.5 -1,True"
    assert lines[-1] == metadata_line("abc123def456") == f"# invlab {__version__} config=abc123def456"
    frame = read_csv(path)
    assert list(frame["j"]) == [1, 2]


def test_csv_is_byte_identical_across_runs(tmp_path):
    a = write_csv(tmp_path / "a.csv", ROWS, "h").read_bytes()
    b = write_csv(tmp_path / "b.csv", ROWS, "h").read_bytes()
    assert a == b


def test_column_order_can_be_fixed(tmp_path):
    path = write_csv(tmp_path / "c.csv", ROWS, "h", columns=["pass", "j"])
    assert path.read_text().splitlines()[0] == "pass,j"


def test_summary_status(tmp_path):
    checks = [CheckOut(name="one", passed=True), CheckOut(name="two", passed=False, detail="residual 1e-3")]
    summary = write_summary(tmp_path / "s.json", "full-suite", 7, "h", checks, {"A": np.float64(2.0)})
    assert summary.status == "FAIL"
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc["extra"] == {"A": 2.0}
    assert doc["tool"] == "invlab" and doc["seed"] == 7


def test_status_lines():
    assert status_line(CheckOut(name="ok", passed=True)) == "✅ PASS ok"
    assert status_line(CheckOut(name="bad", passed=False, detail="x")) == "❌ FAIL bad (x)"
