import json
import subprocess
import sys

import numpy as np
import pytest

from viprox import cli
from viprox.errors import DivergenceError


def run(argv):
    return cli.main([str(a) for a in argv])


def test_md_affine_vi_report(tmp_path, capsys):
    out = tmp_path / "r"
    assert run(["solve", "--solver", "md-rb", "--problem", "affine-vi", "--eps", 0.05,
                "--skew", 0.5, "--out", out]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["solver"] == "md-rb"
    gap = rep["gaps"][0]
    assert gap["certified"] and gap["upper"] <= 0.05 and gap["method"] == "affine-exact"
    assert rep["run_config"]["solver"] == "md-rb" and rep["run_config"]["eps"] == 0.05


def test_covering_solve_writes_bench_row(tmp_path):
    out = tmp_path / "c"
    assert run(["solve", "--solver", "rump", "--problem", "covering", "--case", 1, "--n", 10,
                "--m", 2, "--N", 3, "--eps", 0.5, "--out", out]) == 0
    lines = (out / "bench.csv").read_text().splitlines()
    assert lines[0] == "inv_epsilon,iterations,time_seconds,f_best,g_out" and len(lines) == 2
    assert (out / "trace.csv").exists()


def test_unknown_solver_exits_2_without_artifacts(tmp_path, capsys):
    out = tmp_path / "bad"
    assert run(["solve", "--solver", "newton", "--problem", "skew", "--out", out]) == 2
    assert not out.exists()
    assert "unknown solver" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["solve", "--solver", "ump", "--problem", "nope"],
    ["solve", "--solver", "ump", "--problem", "skew", "--eps", "-1"],
    ["solve", "--solver", "ump", "--problem", "skew", "--eps", "abc"],
    ["solve", "--solver", "saddle-fgm", "--problem", "skew"],
    ["solve", "--solver", "rump", "--problem", "skew"],
    ["bench", "--case", "5"],
    ["bench", "--eps-grid", "1/0x"],
    ["certify", "--problem", "skew"],
])
def test_config_errors_exit_2(argv, tmp_path):
    assert run(argv + ["--out", tmp_path / "o"]) == 2
    assert not (tmp_path / "o").exists()


def test_solver_error_exits_1(monkeypatch, capsys):
    def boom(*a, **k):
        raise DivergenceError("line search exceeded 60 doublings", last_M=1e18, iteration=3)

    monkeypatch.setattr(cli, "ump_solve", boom)
    assert run(["solve", "--solver", "ump", "--problem", "skew"]) == 1
    assert "DivergenceError" in capsys.readouterr().err


def test_uncertified_gap_exits_1(capsys):
    # two iterations cannot reach 1e-6
    assert run(["solve", "--solver", "ump", "--problem", "affine-vi", "--skew", 3,
                "--eps", 1e-6, "--max-iter", 2, "--seed", 1]) == 1
    assert "not certified" in capsys.readouterr().err


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo\nsolver = md-rb\nproblem = affine-vi\neps = 0.2   # loose\nlambda-cap = 4\n")
    out = tmp_path / "o"
    assert run(["solve", "--config", cfg, "--eps", 0.05, "--out", out]) == 0
    echo = json.loads((out / "report.json").read_text())["run_config"]
    assert echo["eps"] == 0.05 and echo["lambda_cap"] == 4.0
    bad = tmp_path / "bad.cfg"
    bad.write_text("solver = md-rb\nwarp = 9\n")
    assert run(["solve", "--config", bad]) == 2
    assert run(["solve", "--config", tmp_path / "missing.cfg"]) == 2


def test_config_echo_round_trip(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run(["solve", "--solver", "saddle-fgm", "--problem", "quadratic-saddle", "--eps", 1e-3,
                "--seed", 3, "--out", out1]) == 0
    assert run(["solve", "--config", out1 / "report.json", "--out", out2]) == 0
    a = json.loads((out1 / "report.json").read_text())
    b = json.loads((out2 / "report.json").read_text())
    for d in (a, b):
        d.pop("wall_time")
        d["run_config"].pop("out")
    assert a == b


def test_bench_outputs_and_determinism(tmp_path, capsys):
    args = ["bench", "--case", 4, "--n", 6, "--m", 2, "--N", 3, "--reps", 1, "--seed", 7,
            "--eps-grid", "1/2,1/4,1/8,1/16,1/32,1/64"]
    assert run(args + ["--out", tmp_path / "x"]) == 0
    assert run(args + ["--out", tmp_path / "y"]) == 0
    rows = [np.loadtxt(tmp_path / d / "bench.csv", delimiter=",", skiprows=1) for d in "xy"]
    assert rows[0].shape == (6, 5)
    keep = [0, 1, 3, 4]
    assert np.array_equal(rows[0][:, keep], rows[1][:, keep])
    assert (tmp_path / "x" / "bench.md").exists()
    assert (tmp_path / "x" / "instance_seed7.txt").exists()


def test_certify_saved_point(tmp_path, capsys):
    out = tmp_path / "r"
    assert run(["solve", "--solver", "ump", "--problem", "skew", "--eps", 0.01, "--out", out]) == 0
    capsys.readouterr()
    assert run(["certify", "--problem", "skew", "--point", out / "report.json"]) == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["kind"] == "vi-restricted" and cert["certified"]
    pt = tmp_path / "p.txt"
    pt.write_text("0.0 0.0 0.0")
    assert run(["certify", "--problem", "skew", "--point", pt]) == 2


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "viprox", "solve", "--solver", "md-rb",
                          "--problem", "affine-vi", "--eps", "0.05"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "md-rb" in res.stdout
