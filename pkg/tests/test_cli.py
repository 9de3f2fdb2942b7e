import csv
import json
import math
import subprocess
import sys

import pytest
from scipy import constants

from feigel import cli

BASE = """
[run]
task = vacuum
[material]
eps = 1
mu = 1
chi_zy = 1e-3
[geometry]
a = 1
"""

SWEEP = BASE + """
[sweep]
parameter = a
start = 0.5
stop = 5
count = 9
spacing = log
"""


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_rows(path):
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_vacuum_run(tmp_path, capsys):
    out = tmp_path / "v.csv"
    assert cli.main(["run", write(tmp_path, BASE), "--out", str(out)]) == 0
    summary = capsys.readouterr().out
    assert "g_hat/chi_zy = 0.0239141622" in summary and "+/-" in summary
    text = out.read_text()
    meta = [ln for ln in text.splitlines() if ln.startswith("#")]
    config = json.loads(meta[0].split(":", 1)[1])
    assert config["material"]["chi_zy"] == "1e-3" and config["output"]["path"] == str(out)
    row = read_rows(out)[0]
    assert float(row["coeff_zy_hat"]) == pytest.approx(0.023914162251948, rel=1e-9)
    assert float(row["g_hat"]) == pytest.approx(1e-3 * float(row["coeff_zy_hat"]), rel=1e-15)
    assert "wall_time" not in row


@pytest.mark.parametrize("override,key", [
    ("geometry.bogus=1", "geometry.bogus"),
    ("material.eps=abc", "material.eps"),
    ("material.eps=-1", "eps"),
    ("run.task=dance", "run.task"),
    ("geometry.a=0", "geometry.a"),
    ("geometry.units=furlong", "geometry.units"),
    ("material.chi_zy=0.5", "chi"),
    ("output.format=xml", "output.format"),
    ("quadrature.kappa_a_max=5", "quadrature"),
])
def test_config_errors(tmp_path, capsys, override, key):
    assert cli.main(["run", write(tmp_path, BASE), "--set", override]) == 2
    assert key in capsys.readouterr().err


def test_sweep_block_rules(tmp_path, capsys):
    assert cli.main(["run", write(tmp_path, BASE), "--task", "sweep"]) == 2
    assert "sweep" in capsys.readouterr().err
    assert cli.main(["run", write(tmp_path, SWEEP)]) == 2
    assert cli.main(["run", write(tmp_path, SWEEP), "--task", "sweep", "--set", "sweep.stop=0.1"]) == 2
    assert "sweep.stop" in capsys.readouterr().err
    assert cli.main(["run", write(tmp_path, SWEEP), "--task", "sweep", "--set", "sweep.start=-1"]) == 2


def test_missing_file(tmp_path):
    assert cli.main(["run", str(tmp_path / "nope.ini")]) == 2


def test_tolerance_exit(tmp_path):
    out = tmp_path / "t.csv"
    code = cli.main(["run", write(tmp_path, BASE), "--out", str(out),
                     "--set", "quadrature.max_subdivisions=2", "--set", "quadrature.rel_tol=1e-15"])
    assert code == 3
    assert read_rows(out)[0]["converged"] == "false"


def test_verify(tmp_path, capsys):
    out = tmp_path / "ver.csv"
    assert cli.main(["run", write(tmp_path, BASE), "--task", "verify", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "FAIL" not in text and text.count("PASS") == len(read_rows(out))
    names = {r["check"] for r in read_rows(out)}
    assert {"radial_I1_quad_vs_series", "cartesian_vs_polar_integral", "chi_yz_null"} <= names


def test_sweep_rows(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["run", write(tmp_path, SWEEP), "--task", "sweep", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 9
    a = [float(r["a"]) for r in rows]
    assert a[0] == 0.5 and a[-1] == pytest.approx(5.0, rel=1e-15)
    hats = [float(r["coeff_zy"]) * x**3 for r, x in zip(rows, a)]
    assert max(abs(h / hats[0] - 1) for h in hats) <= 1e-6


def _data(path):
    return [ln for ln in open(path) if not ln.startswith("#")]


def test_jobs_determinism(tmp_path, monkeypatch):
    cfg = write(tmp_path, SWEEP)
    one, eight = tmp_path / "j1.csv", tmp_path / "j8.csv"
    assert cli.main(["run", cfg, "--task", "sweep", "--jobs", "1", "--out", str(one)]) == 0
    monkeypatch.setenv("FEIGEL_JOBS", "8")
    assert cli.main(["run", cfg, "--task", "sweep", "--out", str(eight)]) == 0
    assert _data(one) == _data(eight)


def test_bad_jobs(tmp_path, monkeypatch):
    monkeypatch.setenv("FEIGEL_JOBS", "many")
    assert cli.main(["run", write(tmp_path, BASE)]) == 2
    assert cli.main(["run", write(tmp_path, BASE), "--jobs", "0"]) == 2


def _mode_rows(tmp_path, chi):
    out = tmp_path / f"m{chi}.json"
    cfg = write(tmp_path, BASE.replace("chi_zy = 1e-3", f"chi_yz = {chi}") + "[modes]\nn_max = 5\nk_x = 0.5, 1, 2\n")
    assert cli.main(["run", cfg, "--task", "mode-table", "--set", "output.format=json",
                     "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["run"]["task"] == "mode-table"
    return doc["rows"]


def test_mode_table(tmp_path):
    zero = _mode_rows(tmp_path, 0.0)
    assert len(zero) == 3 * 5 * 2
    assert all(r["G_pair"] == 0 for r in zero)
    assert {r["k_x"] for r in zero} == {0.5, -0.5, 1.0, -1.0, 2.0, -2.0}
    small, big = _mode_rows(tmp_path, 1e-4), _mode_rows(tmp_path, 1e-3)
    for s, b in zip(small, big):
        assert b["G_pair"] / s["G_pair"] == pytest.approx(10, rel=2e-3)
        assert abs(b["flux_ratio"] - 1) <= 50 * 1e-6


def test_precision_and_timing(tmp_path):
    out = tmp_path / "p.csv"
    cfg = write(tmp_path, BASE + "[output]\nprecision = 6\ntiming = true\n")
    assert cli.main(["run", cfg, "--out", str(out)]) == 0
    row = read_rows(out)[0]
    assert row["coeff_zy_hat"] == "0.0239142"
    assert float(row["wall_time"]) >= 0


def test_si_units(tmp_path):
    out = tmp_path / "si.csv"
    cfg = write(tmp_path, BASE.replace("a = 1", "a = 1e-6\nunits = SI").replace("1e-3", "3e-4"))
    assert cli.main(["run", cfg, "--out", str(out)]) == 0
    assert "hbar" in out.read_text().splitlines()[1]
    row = read_rows(out)[0]
    assert float(row["g_si"]) == pytest.approx(cli.si_convert(float(row["g_hat"]), 1e-6), rel=1e-15)


def test_si_convert():
    g_hat = 0.0239141622519 * 3e-4
    expected = g_hat * constants.hbar / 1e-18
    assert cli.si_convert(g_hat, 1e-6) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(7.566e-22, rel=1e-3)
    assert cli.si_convert(g_hat, 2e-6) == pytest.approx(expected / 8, rel=1e-15)
    assert cli.si_convert(0.0, 1e-6) == 0.0


def test_console_script(tmp_path):
    out = tmp_path / "c.csv"
    proc = subprocess.run([sys.executable, "-m", "feigel.cli", "run", write(tmp_path, BASE),
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()


def test_full_chi_matrix(tmp_path, capsys):
    text = BASE.replace("chi_zy = 1e-3", "chi = full\nchi_zy = 1e-3\nchi_xy = 2e-3")
    out = tmp_path / "f.csv"
    assert cli.main(["run", write(tmp_path, text), "--out", str(out)]) == 0
    assert float(read_rows(out)[0]["chi_zy"]) == 1e-3
    assert cli.main(["run", write(tmp_path, text), "--set", "material.chi_xx=oops"]) == 2
    assert "material.chi_xx" in capsys.readouterr().err
    # off-pair entries need the full form
    assert cli.main(["run", write(tmp_path, BASE), "--set", "material.chi_xy=1e-3"]) == 2
