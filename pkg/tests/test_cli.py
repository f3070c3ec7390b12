import json
from pathlib import Path

import pytest

from fastslow.cli import main
from fastslow.config import load_config, parse_config
from fastslow.io import read_report_csv

from test_config_io import CONFIGS, MINIMAL


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def small(text):
    return text.replace("n_cells = 4096", "n_cells = 512")


@pytest.mark.parametrize("mode", ["solve", "expand", "compare"])
def test_modes_write_artifacts(tmp_path, mode):
    cfg = write(tmp_path, small((CONFIGS / "smooth_compare.cfg").read_text()))
    out = tmp_path / "out"
    assert main([mode, str(cfg), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["mode"] == mode
    assert set(manifest["derived"]) == {"V", "C", "c", "D"}
    for f in manifest["files"]:
        assert Path(f).stat().st_size > 0
    assert parse_config(manifest["config"]) == load_config(cfg, mode)


def test_compare_at_time_zero_is_exact(tmp_path):
    text = small((CONFIGS / "smooth_compare.cfg").read_text()).replace("output_times = 0, 0.5, 1", "output_times = 0")
    cfg = write(tmp_path, text)
    assert main(["compare", str(cfg), "--out", str(tmp_path / "o")]) == 0
    rows = {(m, c): v for m, c, v in read_report_csv(tmp_path / "o" / "report.csv")}
    assert rows[("sup_err", "all")] <= 1e-12


def test_oracle_mode(tmp_path):
    out = tmp_path / "o"
    assert main(["oracle", str(CONFIGS / "oracle.cfg"), "--out", str(out)]) == 0
    rows = read_report_csv(out / "report.csv")
    assert rows and all(m == "rel_err" and v <= 1e-6 for m, c, v in rows)


def test_validation_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, MINIMAL.replace("a = 1\n", "a = -1\n"))
    assert main(["solve", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "line 5" in capsys.readouterr().err
    assert main(["solve", str(tmp_path / "missing.cfg")]) == 1
    assert main(["oracle", str(write(tmp_path, MINIMAL, "m.cfg")), "--out", str(tmp_path / "o")]) == 1


def test_runtime_exit_code(tmp_path):
    # blow-up: strong positive self-coupling over the horizon overflows
    text = MINIMAL.replace("c3 = 0.25", "c3 = 1e300").replace("w_kind = step", "w_kind = gaussian")
    assert main(["solve", str(write(tmp_path, text)), "--out", str(tmp_path / "o")]) == 2


def test_sweep_mode_small(tmp_path):
    text = small((CONFIGS / "sweep.cfg").read_text()).replace("max_refinements", "#")
    text += "max_refinements = 0\n"
    out = tmp_path / "o"
    assert main(["sweep", str(write(tmp_path, text)), "--out", str(out)]) == 0
    summary = (out / "summary.csv").read_text().splitlines()
    assert summary[0] == "epsilon,n_cells,sup_err_u,l1_err_u,self_err_u,resolved"
    assert len(summary) == 4
    metrics = {m for m, _, _ in read_report_csv(out / "report.csv")}
    assert metrics == {"slope", "r_squared"}
