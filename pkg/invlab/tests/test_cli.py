import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from invlab.main import build_parser, main
from invlab.services.fourier_division import SpectralGrid
from invlab.utils.gridio import read_grid
from invlab.utils.reports import read_csv

DELTA = {"kind": "point_mass", "dimension": 1, "atoms": [{"coeff": 1.0, "deriv": [0], "point": [0.0]}]}
SUPER_DECAYING = {"kind": "synthetic", "name": "super_decaying"}


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("INVLAB_THREADS", "INVLAB_SEED", "INVLAB_OUTPUT_DIR", "INVLAB_LOG_LEVEL", "INVLAB_GATE_HORIZON"):
        monkeypatch.delenv(name, raising=False)


def _summary(out_dir, scenario):
    return json.loads((out_dir / f"{scenario}_summary.json").read_text())


def test_check_invertibility_of_delta(tmp_path, write_spec, capsys):
    spec = write_spec("delta.json", DELTA)
    out = tmp_path / "out"
    code = main(["check-invertibility", "--function", str(spec), "--horizon", "20",
                 "--threads", "1", "--output-dir", str(out)])
    assert code == 0
    text = (out / "check_invertibility.csv").read_text()
    assert text.splitlines()[0] == "xi_norm,ball_radius,best_abs_F,threshold,pass"
    assert text.rstrip().splitlines()[-1].startswith("# invlab ")
    assert read_csv(out / "check_invertibility.csv")["pass"].all()
    summary = _summary(out, "check-invertibility")
    assert summary["status"] == "PASS"
    assert summary["extra"]["verdict"] == "satisfied-at(1)"
    assert "✅ PASS slow-decrease" in capsys.readouterr().out


def test_super_decaying_is_reported_as_violated(tmp_path, write_spec):
    spec = write_spec("sd.json", SUPER_DECAYING)
    code = main(["check-invertibility", "--function", str(spec), "--horizon", "100",
                 "--threads", "1", "--output-dir", str(tmp_path)])
    assert code == 1
    assert _summary(tmp_path, "check-invertibility")["status"] == "FAIL"


def test_malformed_spec_is_a_config_error(tmp_path, write_spec, capsys):
    spec = write_spec("bad.json", {"kind": "mystery"})
    code = main(["check-invertibility", "--function", str(spec), "--output-dir", str(tmp_path)])
    assert code == 2
    assert "ConfigError" in capsys.readouterr().err
    assert not (tmp_path / "check_invertibility.csv").exists()


def test_missing_subcommand_and_config(tmp_path):
    assert main(["--output-dir", str(tmp_path)]) == 2
    assert main(["--config", str(tmp_path / "absent.json")]) == 2


def test_argparse_rejects_missing_required_flag():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["check-invertibility"])
    assert info.value.code == 2


def test_config_file_drives_the_run(tmp_path, write_spec):
    spec = write_spec("delta.json", DELTA)
    config = write_spec("run.json", {"scenario": "check-invertibility", "function": str(spec),
                                     "horizon": 10.0, "seed": 7})
    out = tmp_path / "cfg"
    assert main(["--config", str(config), "--output-dir", str(out), "--threads", "1"]) == 0
    summary = _summary(out, "check-invertibility")
    assert summary["seed"] == 7
    assert len(summary["config_hash"]) == 12


def test_fundamental_solution_writes_quotient_grid(tmp_path, write_spec):
    spec = write_spec("delta.json", DELTA)
    code = main(["fundamental-solution", "--mu", str(spec), "--grid", "256",
                 "--threads", "1", "--output-dir", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "quotient.grid").stat().st_size > 0
    rows = read_csv(tmp_path / "fundamental_solution.csv")
    assert list(rows.columns) == ["test", "residual", "tolerance", "pass"]
    assert rows["pass"].all()


def test_fundamental_solution_refuses_super_decaying(tmp_path, write_spec):
    spec = write_spec("sd.json", SUPER_DECAYING)
    code = main(["fundamental-solution", "--mu", str(spec), "--threads", "1", "--output-dir", str(tmp_path)])
    assert code == 1
    assert _summary(tmp_path, "fundamental-solution")["extra"]["refused"] == "violated"


def test_witness_family_for_super_decaying(tmp_path, write_spec):
    spec = write_spec("sd.json", SUPER_DECAYING)
    code = main(["witness-family", "--function", str(spec), "--jmax", "2",
                 "--threads", "1", "--output-dir", str(tmp_path)])
    assert code == 0
    rows = read_csv(tmp_path / "witness_family.csv")
    assert list(rows["j"]) == [1, 2]
    assert (tmp_path / "witness_properties.csv").exists()


def test_rank_one_projection_slice_suite(tmp_path, capsys):
    code = main(["rank-one", "verify", "--suite", "projection-slice", "--threads", "1", "--output-dir", str(tmp_path)])
    assert code == 0
    rows = read_csv(tmp_path / "rank_one_projection-slice.csv")
    assert list(rows.columns) == ["case", "check", "residual", "tolerance", "pass"]
    assert {"delta_o", "laplacian", "pair", "bump"} <= set(rows["case"])
    assert rows["pass"].all()
    assert _summary(tmp_path, "rank-one")["status"] == "PASS"
    assert "projection-slice:bump:projection-slice" in capsys.readouterr().out


@pytest.mark.slow
def test_full_suite_is_byte_identical_across_runs(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        assert main(["full-suite", "--seed", "11", "--threads", "1", "--output-dir", str(out)]) != 2
    names = sorted(p.name for p in first.glob("*.csv"))
    assert names
    assert names == sorted(p.name for p in second.glob("*.csv"))
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_disk_quotient_grid_is_a_uniform_resample(tmp_path, write_spec):
    spec = write_spec("lap.json", {"kind": "radial", "atoms": [{"coeff": 1.0, "power": 1}]})
    code = main(["fundamental-solution", "--mu", str(spec), "--epsilon", "1e-8",
                 "--threads", "1", "--output-dir", str(tmp_path)])
    assert code == 0
    lower, upper, samples = read_grid(tmp_path / "quotient.grid")
    assert (lower, upper) == ((0.0,), (SpectralGrid().cutoff,))
    assert samples.shape == (SpectralGrid().nodes,)
    lam = (np.arange(samples.size) + 0.5) * upper[0] / samples.size
    assert_allclose(samples, -1.0 / (lam ** 2 + 0.25), rtol=1e-6)
