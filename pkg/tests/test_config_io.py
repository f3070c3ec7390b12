from pathlib import Path

import numpy as np
import pytest

from fastslow.asymptotics import RegularPart
from fastslow.config import Mode, format_config, load_config, parse_config
from fastslow.errors import MissingKey, NonPositiveRelaxation, ParseError, UnknownKey, WriteFailure
from fastslow.initial_data import FieldTriple, Grid1D, ProfileKind
from fastslow.io import read_fields_csv, read_report_csv, write_fields_csv, write_report_csv
from fastslow.solver import Boundary

from conftest import make_params

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

MINIMAL = """\
mode = solve
k1 = 1
k2 = 2
k3 = 0.5
a = 1
b = 2
c1 = 0.5
c2 = 0.5
a3 = 0.5
b3 = 0.5
c3 = 0.25
epsilon = 0.1   # small parameter
T = 1
x_min = -12
x_max = 12
n_cells = 256
u_kind = gaussian
v_kind = gaussian
w_kind = step
"""


def test_minimal_config_defaults():
    spec = parse_config(MINIMAL)
    assert spec.mode is Mode.SOLVE
    assert spec.solver.cfl == 0.9
    assert spec.solver.boundary is Boundary.OUTFLOW
    assert spec.solver.output_times == (1.0,)
    assert spec.params.epsilon == 0.1
    assert spec.ic.w.kind is ProfileKind.STEP


def test_missing_key_named():
    text = "\n".join(line for line in MINIMAL.splitlines() if not line.startswith("epsilon"))
    with pytest.raises(MissingKey) as info:
        parse_config(text)
    assert info.value.key == "epsilon"


def test_unknown_key():
    with pytest.raises(UnknownKey) as info:
        parse_config(MINIMAL + "gamma = 1\n")
    assert info.value.key == "gamma" and info.value.lineno == 20


def test_parse_error_has_line():
    with pytest.raises(ParseError) as info:
        parse_config(MINIMAL + "this is not a pair\n")
    assert info.value.lineno == 20
    with pytest.raises(ParseError):
        parse_config(MINIMAL.replace("k3 = 0.5", "k3 = fast"))


def test_negative_relaxation_has_line_context():
    with pytest.raises(NonPositiveRelaxation, match=r"a \(line 5\)"):
        parse_config(MINIMAL.replace("a = 1\n", "a = -1\n"))


def test_sweep_epsilons_checked():
    text = MINIMAL.replace("mode = solve", "mode = sweep")
    with pytest.raises(MissingKey):
        parse_config(text)
    with pytest.raises(Exception, match="decreasing"):
        parse_config(text + "sweep_epsilons = 0.1, 0.2\n")
    spec = parse_config(text + "sweep_epsilons = 0.2, 0.1, 0.05\n")
    assert spec.sweep_epsilons == (0.2, 0.1, 0.05)


def test_mode_override():
    assert parse_config(MINIMAL, "expand").mode is Mode.EXPAND


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.cfg")), ids=lambda p: p.name)
def test_round_trip(path):
    spec = load_config(path)
    assert parse_config(format_config(spec)) == spec


def test_fields_csv_layout(tmp_path):
    g = Grid1D(0, 1, 4)
    tri = FieldTriple(np.array([0.1, 1 / 3, 2.0, -5.0]), np.zeros(4), np.full(4, np.pi), 0.25)
    path = write_fields_csv(tri, g, tmp_path / "f.csv")
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert len(lines) == 5 and lines[0] == "x,u,v,w,t"
    assert lines[2].split(",")[1] == "0.33333333333333331"
    x, back = read_fields_csv(path)
    np.testing.assert_array_equal(x, g.x)
    for name in "uvw":
        np.testing.assert_array_equal(getattr(back, name), getattr(tri, name))
    assert back.t == 0.25
    again = write_fields_csv(tri, g, tmp_path / "g.csv")
    assert again.read_bytes() == raw


def test_regular_part_csv_slaving(tmp_path):
    vp = make_params(a=1.7, b=0.3)
    g = Grid1D(0, 1, 5)
    rp = RegularPart(np.linspace(-1, 1, 5), np.ones(5), 0.5)
    _, back = read_fields_csv(write_fields_csv(rp, g, tmp_path / "r.csv", vp))
    np.testing.assert_array_equal(back.v, (vp.a / vp.b) * back.u)


def test_report_round_trip(tmp_path):
    rows = [("sup_err", "u", 1e-3 / 3), ("slope", "u", 2.0)]
    assert read_report_csv(write_report_csv(rows, tmp_path / "r.csv")) == rows


def test_write_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(WriteFailure):
        write_report_csv([("a", "b", 1.0)], blocker / "sub" / "r.csv")
