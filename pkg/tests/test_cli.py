"""Command-line behaviour: grammar, exit codes, output formats and golden files.

Regenerate the golden files with ``python3 tests/test_cli.py --regen``
after an intentional change of numerical output.
"""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from grassradon import ParseError
from grassradon.cli import main, parse_grid

sys.path.insert(0, os.path.dirname(__file__))
from cli_cases import CASES, GOLDEN_DIR, SMALL_CFG, golden_path  # noqa: E402


def run(argv, tmp_path, name="out.txt"):
    out = tmp_path / name
    rc = main([*argv, "--out", str(out)])
    return rc, (out.read_text() if out.exists() else "")


def csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def summary(text):
    return dict(ln[2:].split("=", 1) for ln in text.splitlines() if ln.startswith("# "))


# ---------------------------------------------------------------------------
# Grid grammar
# ---------------------------------------------------------------------------

def test_parse_grid_values():
    g = parse_grid("angles=64,offsets=-4:4:81,domain=ball,r=2.5e0")
    assert g["angles"] == 64.0
    np.testing.assert_array_equal(g["offsets"], np.linspace(-4, 4, 81))
    assert g["domain"] == "ball"
    assert g["r"] == 2.5


def test_parse_grid_empty():
    assert parse_grid("") == {}
    assert parse_grid("   ") == {}


@pytest.mark.parametrize("text, pos", [
    ("angles", 6),
    ("=3", 0),
    ("a=", 2),
    ("a=1:2", 5),
    ("a=1:2:3:4", 7),
    ("a=1;b=2", 3),
    ("a=0:1:2.5", 8),
])
def test_parse_grid_errors(text, pos):
    with pytest.raises(ParseError) as info:
        parse_grid(text)
    assert info.value.position == pos


# ---------------------------------------------------------------------------
# forward
# ---------------------------------------------------------------------------

def test_forward_row_count(tmp_path):
    rc, text = run(["forward", "--case", "classical2d", "--field", "gaussian()",
                    "--grid", "angles=64,offsets=-4:4:81"], tmp_path)
    assert rc == 0
    header, rows = csv_rows(text)
    assert header == ["index", "b11", "b21", "v1", "v2", "value"]
    assert len(rows) == 64 * 81
    vals = np.array([float(r[-1]) for r in rows])
    s = np.array([np.hypot(float(r[3]), float(r[4])) for r in rows])
    np.testing.assert_allclose(vals, np.sqrt(np.pi) * np.exp(-s ** 2), rtol=1e-6, atol=1e-15)


def test_forward_zero_field(tmp_path):
    rc, text = run(["forward", "--case", "grass14", "--field", "zero()", "--grid", "planes=3,offsets=0:2:3"],
                   tmp_path)
    assert rc == 0
    _, rows = csv_rows(text)
    assert len(rows) == 9
    assert all(float(r[-1]) == 0.0 for r in rows)


def test_forward_malformed_grid(tmp_path, capsys):
    rc, _ = run(["forward", "--case", "classical2d", "--grid", "angles=6,offsets=1:2"], tmp_path)
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_forward_grid_key_for_other_case(tmp_path):
    rc, _ = run(["forward", "--case", "classical2d", "--grid", "planes=3"], tmp_path)
    assert rc == 2


def test_forward_json(tmp_path):
    rc, text = run(["forward", "--case", "classical2d", "--grid", "angles=2,offsets=0:1:2", "--format", "json"],
                   tmp_path)
    assert rc == 0
    obj = json.loads(text)
    assert set(obj) == {"rows", "summary"}
    assert len(obj["rows"]) == 4
    assert obj["summary"]["rows"] == 4


def test_forward_bad_field_spec(tmp_path, capsys):
    rc, _ = run(["forward", "--case", "classical2d", "--field", "gaussian(scale=)"], tmp_path)
    assert rc == 2
    assert "15" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# slice-check, moments, invert
# ---------------------------------------------------------------------------

def test_slice_check_grass14_passes(tmp_path):
    rc, text = run(["slice-check", "--probes", "5"], tmp_path)
    assert rc == 0
    s = summary(text)
    assert float(s["max_residual"]) < 1e-2
    header, rows = csv_rows(text)
    assert header[-1] == "residual"
    assert len(rows) == 5


def test_slice_check_zero_field(tmp_path):
    rc, text = run(["slice-check", "--case", "classical2d", "--field", "zero()", "--probes", "4"], tmp_path)
    assert rc == 0
    _, rows = csv_rows(text)
    assert all(float(r[-1]) == 0.0 for r in rows)


def test_slice_check_no_probes(tmp_path):
    rc, _ = run(["slice-check", "--probes", "0"], tmp_path)
    assert rc == 2


def test_slice_check_tolerance_fail(tmp_path):
    rc, text = run(["slice-check", "--case", "classical2d", "--probes", "3", "--tol", "0"], tmp_path)
    assert rc == 1
    assert summary(text)["pass"] == "false"


def test_moments_gaussian(tmp_path):
    rc, text = run(["moments", "--kmax", "4", "--probes", "1", "--config", SMALL_CFG], tmp_path)
    assert rc == 0
    assert float(summary(text)["max_residual"]) < 1e-2
    header, _ = csv_rows(text)
    assert header == ["kind", "k", "probe", "node", "residual", "condition_number"]


def test_moments_zero(tmp_path):
    rc, text = run(["moments", "--field", "zero()", "--kmax", "2", "--probes", "1", "--config", SMALL_CFG],
                   tmp_path)
    assert rc == 0
    _, rows = csv_rows(text)
    assert all(float(r[4]) == 0.0 for r in rows)


def test_moments_negative_kmax(tmp_path):
    rc, _ = run(["moments", "--kmax", "-1"], tmp_path)
    assert rc == 2


def test_invert_gaussian(tmp_path):
    rc, text = run(["invert", "--probes", "5"], tmp_path)
    assert rc == 0
    assert float(summary(text)["max_relative_error"]) < 5e-2


def test_invert_zero(tmp_path):
    rc, text = run(["invert", "--field", "zero()", "--probes", "3", "--config", SMALL_CFG], tmp_path)
    assert rc == 0
    _, rows = csv_rows(text)
    assert all(float(r[3]) == 0.0 for r in rows)


def test_invert_unsupported_case(tmp_path, capsys):
    rc, _ = run(["invert", "--case", "classical2d"], tmp_path)
    assert rc == 3
    assert "unsupported" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# support and funk-table
# ---------------------------------------------------------------------------

def test_support_truncate_shell(tmp_path):
    rc, text = run(["support", "--mode", "truncate", "--field", "shell_bump(r0=1,r1=2)",
                    "--mode-args", "R=2,probes=6"], tmp_path)
    assert rc == 0
    s = summary(text)
    assert float(s["max_abs_outside"]) < 5e-3 * float(s["peak"])


def test_support_truncate_zero(tmp_path):
    rc, text = run(["support", "--mode", "truncate", "--field", "zero()", "--mode-args", "R=2,probes=3",
                    "--config", SMALL_CFG], tmp_path)
    assert rc == 0
    assert float(summary(text)["max_abs_outside"]) == 0.0


def test_support_pw_zero(tmp_path):
    rc, text = run(["support", "--mode", "pw", "--field", "zero()", "--mode-args", "R=1,kmax=1",
                    "--config", SMALL_CFG], tmp_path)
    assert rc == 0
    _, rows = csv_rows(text)
    assert all(float(r[3]) == 0.0 for r in rows)


def test_support_pw_needs_compact_field(tmp_path):
    rc, _ = run(["support", "--mode", "pw", "--field", "gaussian()"], tmp_path)
    assert rc == 3


def test_support_bad_mode(tmp_path):
    rc, _ = run(["support", "--mode", "sideways"], tmp_path)
    assert rc == 2


def test_support_bad_mode_args(tmp_path):
    rc, _ = run(["support", "--mode", "truncate", "--mode-args", "radius=2"], tmp_path)
    assert rc == 2


def test_support_hyperplane_wrong_case(tmp_path):
    rc, _ = run(["support", "--mode", "hyperplane", "--field", "ball_bump()"], tmp_path)
    assert rc == 3


def test_support_hyperplane_unknown_domain(tmp_path):
    rc, _ = run(["support", "--mode", "hyperplane", "--case", "classical3d_lines", "--field", "ball_bump()",
                 "--mode-args", "domain=cube"], tmp_path)
    assert rc == 2


def test_funk_table_values(tmp_path):
    rc, text = run(["funk-table", "--lmax", "6"], tmp_path)
    assert rc == 0
    _, rows = csv_rows(text)
    assert [int(r[0]) for r in rows] == [0, 2, 4, 6]
    np.testing.assert_allclose([float(r[1]) for r in rows], [1.0, -0.5, 0.375, -0.3125], rtol=0, atol=1e-15)


# ---------------------------------------------------------------------------
# Configuration and I/O
# ---------------------------------------------------------------------------

def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("case = classical2d\nfield = zero()\n# comment\n")
    rc, text = run(["forward", "--config", str(cfg), "--field", "gaussian()", "--grid", "angles=1,offsets=0"],
                   tmp_path)
    assert rc == 0
    assert summary(text)["case"] == "classical2d"
    _, rows = csv_rows(text)
    assert float(rows[0][-1]) == pytest.approx(np.sqrt(np.pi), rel=1e-12)


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    rc, _ = run(["funk-table", "--config", str(cfg)], tmp_path)
    assert rc == 2


def test_config_bad_line(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("fiber_points 3\n")
    rc, _ = run(["funk-table", "--config", str(cfg)], tmp_path)
    assert rc == 2


def test_missing_config_file(tmp_path):
    rc, _ = run(["funk-table", "--config", str(tmp_path / "nope.cfg")], tmp_path)
    assert rc == 4


def test_unwritable_output(tmp_path):
    rc = main(["funk-table", "--out", str(tmp_path / "missing" / "out.csv")])
    assert rc == 4


def test_seed_range(tmp_path):
    assert run(["funk-table", "--seed", "0xFFFFFFFFFFFFFFFF"], tmp_path)[0] == 0
    assert run(["funk-table", "--seed", str(2 ** 64)], tmp_path)[0] == 2


def test_seed_changes_random_grids(tmp_path):
    a = run(["forward", "--grid", "planes=2,offsets=1", "--seed", "1"], tmp_path, "a.csv")[1]
    b = run(["forward", "--grid", "planes=2,offsets=1", "--seed", "2"], tmp_path, "b.csv")[1]
    assert a != b


def test_stdout_output(capsys):
    assert main(["funk-table", "--lmax", "2"]) == 0
    assert capsys.readouterr().out.startswith("l,multiplier\n")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "grassradon", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "start:end:count" in proc.stdout


# ---------------------------------------------------------------------------
# Golden files
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, tmp_path):
    rc, text = run(CASES[name], tmp_path)
    assert rc == 0
    assert text == golden_path(name).read_text(), f"output of {name} differs from {golden_path(name).name}"


def test_csv_header_and_float_format():
    for path in GOLDEN_DIR.glob("*.csv"):
        lines = path.read_text().splitlines()
        assert lines[0] and not lines[0].startswith("#")
        for ln in lines[1:]:
            if ln.startswith("#"):
                continue
            for cell in ln.split(","):
                try:
                    x = float(cell)
                except ValueError:
                    continue
                assert repr(x) == cell or str(int(x)) == cell


def _regen():
    for name, argv in CASES.items():
        rc = main([*argv, "--out", str(golden_path(name))])
        print(f"{name}: exit {rc}")


if __name__ == "__main__":
    if "--regen" in sys.argv:
        _regen()
