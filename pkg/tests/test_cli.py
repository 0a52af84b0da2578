import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from kfptools import __version__
from kfptools.cli import main
from kfptools.polynomial import Polynomial
from kfptools.potentials import example1, example2, example3, harmonic, quartic
from kfptools.reporting import config_hash, sha256_file


@pytest.fixture
def pot(tmp_path):
    def write(poly, name="v.json"):
        path = tmp_path / name
        path.write_text(poly.to_json())
        return str(path)
    return write


def _manifest(out):
    return json.loads((Path(out) / "manifest.json").read_text())


def test_analyze_writes_manifest(pot, tmp_path):
    out = tmp_path / "o"
    code = main(["analyze", "--potential", pot(example1()), "--point", "1,1", "--out", str(out)])
    assert code == 0
    doc = json.loads((out / "analysis.json").read_text())
    assert doc["points"][0]["gradient_norm"] == pytest.approx(2 * 2 ** 0.5)
    m = _manifest(out)
    assert m["version"] == __version__ and m["seed"] == 0 and m["exit_code"] == 0
    assert m["config_hash"] == config_hash(m["config"])
    for art in m["artifacts"]:
        assert sha256_file(out / art["path"]) == art["sha256"]


def test_zero_polynomial_exit_1(pot, tmp_path, capsys):
    code = main(["analyze", "--potential", pot(Polynomial(2, {})), "--point", "0,0",
                 "--out", str(tmp_path / "o")])
    assert code == 1
    assert "zero polynomial rejected" in capsys.readouterr().err


def test_malformed_json_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d": 2,\n "terms": [ {"alpha": [1, 0] "c": 1}]}')
    code = main(["analyze", "--potential", str(bad), "--point", "0,0", "--out", str(tmp_path / "o")])
    assert code == 1
    assert "line 2, column" in capsys.readouterr().err


def test_usage_errors_exit_1(tmp_path, pot):
    assert main([]) == 1
    assert main(["nonsense"]) == 1
    assert main(["analyze", "--potential", pot(example1()), "--point", "a,b"]) == 1
    assert main(["analyze", "--potential", str(tmp_path / "missing.json"), "--point", "0,0",
                 "--out", str(tmp_path / "o")]) == 1
    assert main(["analyze", "--potential", pot(example1()), "--point", "1,2,3",
                 "--out", str(tmp_path / "o")]) == 1


def test_budget_exceeded_exit_1(pot, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("KFPTOOLS_MATRIX_BUDGET", "50")
    code = main(["witten-spectrum", "--potential", pot(harmonic(1)), "--nq", "64",
                 "--out", str(tmp_path / "o")])
    assert code == 1
    assert "budget 50" in capsys.readouterr().err


def test_sigma_scan_contour(pot, tmp_path):
    out = tmp_path / "o"
    code = main(["sigma-scan", "--potential", pot(example1()), "--kappa", "800", "--box", "10",
                 "--nq", "16", "--out", str(out)])
    assert code == 0
    rows = list(csv.reader((out / "contour.csv").open()))
    assert rows[0] == ["q1", "q2", "member", "lhs", "rhs"]
    assert len(rows) == 1 + 16 * 16
    # the complement sits on the axes
    axis = [r for r in rows[1:] if float(r[0]) == -10.0 and r[2] == "0"]
    assert axis
    assert json.loads((out / "scan.json").read_text())["verdict"] == "unbounded"


def test_check_assumption_exit_codes(pot, tmp_path):
    args = ["--nq", "32", "--probes", "128"]
    assert main(["check-assumption", "--potential", pot(example2(1)), "--out",
                 str(tmp_path / "a"), *args]) == 0
    assert main(["check-assumption", "--potential", pot(example2(2)), "--out",
                 str(tmp_path / "b"), *args]) == 2
    assert _manifest(tmp_path / "b")["status"] == "fail"


def test_partition_command(pot, tmp_path):
    out = tmp_path / "o"
    assert main(["partition", "--potential", pot(example1()), "--box", "1", "--samples", "2000",
                 "--out", str(out)]) == 0
    assert json.loads((out / "partition_check.json").read_text())["pass"] is True
    assert main(["partition", "--potential", pot(harmonic(2)), "--out", str(tmp_path / "q")]) == 1


def test_ims_commands(pot, tmp_path):
    assert main(["ims-check", "--potential", pot(quartic(1)), "--partition", "trivial",
                 "--out", str(tmp_path / "t")]) == 0
    assert main(["ims-check", "--potential", pot(quartic(1)), "--fd-order", "2",
                 "--out", str(tmp_path / "b")]) == 0
    doc = json.loads((tmp_path / "b" / "ims.json").read_text())
    assert all(abs(o - 2) <= 0.3 for o in doc["observed_orders"])


def test_subelliptic_and_witten(pot, tmp_path):
    assert main(["subelliptic", "--potential", pot(harmonic(1)), "--nq", "32", "--np", "8",
                 "--trials", "2", "--out", str(tmp_path / "s")]) == 0
    assert main(["witten-spectrum", "--potential", pot(harmonic(1)), "--out", str(tmp_path / "w")]) == 0
    spec = json.loads((tmp_path / "w" / "spectrum.json").read_text())
    assert spec["values"] == pytest.approx([0, 2, 4], abs=1e-3)
    assert (tmp_path / "w" / "witten.mtx").exists()


def test_weyl_without_potential(tmp_path):
    assert main(["weyl", "--out", str(tmp_path / "w")]) == 0
    assert main(["analyze", "--point", "0,0", "--out", str(tmp_path / "x")]) == 1


def test_rerun_is_byte_identical(pot, tmp_path):
    path = pot(example3(0.5))
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        assert main(["sigma-scan", "--potential", path, "--kappa", "2", "--box", "5", "--nq", "16",
                     "--seed", "7", "--out", str(out)]) == 0
        outs.append(out)
    files = sorted(p.name for p in outs[0].iterdir())
    assert files == sorted(p.name for p in outs[1].iterdir())
    for f in files:
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()


def test_console_script_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "kfptools.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
