import json
import subprocess
import sys

import numpy as np
import pytest

from nde5.cli import main, svg_lines


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rh_antisymmetric(capsys):
    code, out, _ = run(capsys, "rh", "--minus", "1,0,0,0,0", "--plus", "-1,0,0,0,0")
    assert code == 0 and out.strip() == "lambda = 0"


def test_rh_exact_rational(capsys):
    code, out, _ = run(capsys, "rh", "--minus", "1,2,0,1/3,0", "--plus", "-1,0,1,0,0")
    assert code == 0
    assert "lambda (exact) = -1/6" in out


def test_roots_compacton_interface(capsys):
    code, out, _ = run(capsys, "roots", "--context", "compacton-interface")
    assert code == 0
    roots = [complex(*r) for r in json.loads(out)["roots"]]
    want = [-4, 7, (3 + 1j * np.sqrt(111)) / 2, (3 - 1j * np.sqrt(111)) / 2]
    assert all(min(abs(r - w) for r in roots) < 1e-10 for w in want)


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        ["rh", "--minus", "1,0,0", "--plus", "-1,0,0,0,0"],
        ["rh", "--minus", "1,0,0,0,0", "--plus", "1,0,0,0,0"],
        ["roots", "--context", "nowhere"],
        ["blowup", "--alpha", "1/0"],
        ["rate", "--what", "l1", "--profile", "/nonexistent/p.csv"],
        ["evolve", "--delta", "40"],
    ],
)
def test_bad_arguments_exit_3(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 3 and err


def test_solver_failure_exit_2(capsys):
    code, _, err = run(capsys, "shoot-d0", "--kind", "n50", "--bracket", "0.5,1", "--tol", "1e-3")
    assert code == 2 and "SameClassAtBracket" in err


def test_manifest_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        code, _, _ = run(capsys, "compacton", "--which", "k22", "--out", str(d), "--plot")
        assert code == 0
    man = json.loads((a / "manifest.json").read_text())
    assert set(man) == {"command", "params", "paper_anchor", "outputs", "metrics"}
    assert man["paper_anchor"]
    for name in ("compacton.csv", "compacton.json", "compacton.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert man["metrics"]["residual"] < 1e-12


def test_evolve_writes_snapshots(tmp_path, capsys):
    code, out, _ = run(capsys, "evolve", "--kind", "uniform-div", "--t-end", "0.01", "--out", str(tmp_path))
    assert code == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert len(man["metrics"]["indicators"]) == 5
    assert (tmp_path / "snapshot_00.csv").read_text().startswith("x,u\n")


def test_time5(capsys):
    code, out, _ = run(capsys, "time5", "--A", "1", "--B", "0")
    assert code == 0 and "g(-inf) = 1" in out


def test_sixteen_digits(capsys):
    code, out, _ = run(capsys, "compacton", "--which", "k22")
    assert "y0 = 6.283185307179586" in out


def test_svg_is_well_formed():
    text = svg_lines([(np.arange(5), np.arange(5) ** 2)], logxy=False)
    assert text.startswith("<svg") and text.strip().endswith("</svg>")
    assert "<polyline" in text


def test_console_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "nde5.cli", "rh", "--minus", "2,0,0,0,0", "--plus", "-2,0,0,0,0"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and res.stdout.strip() == "lambda = 0"
