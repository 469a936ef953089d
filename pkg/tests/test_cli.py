import json
import subprocess
import sys

import pytest

from squeezebound.cli import run

MODEL_SPEC = """\
dim = 3
q = (0, 0, 0)
locality_radius = 0.5
rho = Re(t) + |z|^2*|w|^2 + |z|^10 + |w|^10
"""


def records_of(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_experiment_closed_form(tmp_path, capsys):
    code = run(["experiment", "--builtin", "model", "--k", "2", "--deltas", "1e-2:1e-6:5",
                "--mode", "closed-form", "--out-dir", str(tmp_path), "--deterministic"])
    assert code == 0
    recs = records_of(tmp_path / "experiment.jsonl")
    summary = recs[-1]
    assert summary["record"] == "summary"
    assert abs(summary["slope"] - 1 / 72) <= 1e-12
    assert summary["theoretical_exponent"] == "1/72"
    csv_lines = (tmp_path / "experiment.csv").read_text().splitlines()
    assert csv_lines[0] == "delta,K_axis_upper,K_diag_lower,lambda,r_d,epsilon,bound"
    assert len(csv_lines) == 6


def test_kobayashi_ball(tmp_path):
    assert run(["kobayashi", "--builtin", "ball", "--r", "1", "--point", "0,0,0", "--dir", "1,0,0",
                "--out-dir", str(tmp_path)]) == 0
    head, up, *lows = records_of(tmp_path / "kobayashi.jsonl")
    assert "timestamp" in head
    assert up["kind"] == "upper_witness" and 1.0 <= up["value"] <= 1.002
    assert len(up["config_hash"]) == 16 and len(head["config_hash"]) == 64
    assert all(low["value"] <= up["value"] for low in lows)


def test_squeeze_bound_negative_control(tmp_path):
    assert run(["squeeze-bound", "--builtin", "convex-control", "--delta", "1e-3",
                "--out-dir", str(tmp_path)]) == 0
    rec = records_of(tmp_path / "squeeze-bound.jsonl")[1]
    assert rec["bound"] == 1 and rec["diagnostic"] == "no certificate"


def test_normal_form_from_spec(tmp_path):
    spec = tmp_path / "model.spec"
    spec.write_text(MODEL_SPEC)
    assert run(["normal-form", str(spec), "--out-dir", str(tmp_path)]) == 0
    rec = records_of(tmp_path / "normal-form.jsonl")[1]
    assert rec["status"] == "normalized" and rec["k"] == 2 and rec["d"] == 4
    # the quadratic normalisation supplies |t|^2; P and the higher terms follow
    assert rec["rho"].startswith("Re(t) + |t|^2")
    assert "|z|^2*|w|^2" in rec["rho"]
    assert rec["degrees"] == {"P": 4, "Q": 8, "R": None}


def test_indicatrix(tmp_path):
    assert run(["indicatrix", "--builtin", "ball", "--point", "0,0,0", "--dirs", "1,0,0;0,1j,0",
                "--out-dir", str(tmp_path)]) == 0
    rec = records_of(tmp_path / "indicatrix.jsonl")[1]
    assert all(0.998 <= e["r_lo"] <= e["r_hi"] <= 1.0 for e in rec["entries"])


def test_deterministic_output_is_byte_identical(tmp_path):
    outs = []
    for sub in ("a", "b"):
        argv = ["kobayashi", "--builtin", "model", "--k", "2", "--point", "0,0,-0.01",
                "--dir", "1,1,0", "--out-dir", str(tmp_path), "--name", "run", "--deterministic",
                "--seed", "7"]
        assert run(argv) == 0
        outs.append((tmp_path / "run.jsonl").read_bytes())
    assert outs[0] == outs[1]


def test_exit_codes(tmp_path, capsys):
    assert run([]) == 2
    assert run(["frobnicate"]) == 2
    assert run(["kobayashi", "--builtin", "ball", "--point", "0,0,0"]) == 2
    assert run(["kobayashi", "--point", "0,0,0", "--dir", "1,0,0"]) == 2
    assert run(["experiment", "--builtin", "model", "--deltas", "1:2", "--out-dir", str(tmp_path)]) == 2
    assert run(["kobayashi", "--builtin", "torus", "--point", "0,0,0", "--dir", "1,0,0"]) == 1
    assert run(["kobayashi", "--builtin", "model", "--k", "1", "--point", "0,0,-0.1",
                "--dir", "1,0,0"]) == 1
    assert run(["squeeze-bound", "--builtin", "model", "--delta", "0.3",
                "--out-dir", str(tmp_path)]) == 1
    bad = tmp_path / "bad.spec"
    bad.write_text(MODEL_SPEC.replace("|z|^10", "|z|^9"))
    capsys.readouterr()
    assert run(["normal-form", str(bad), "--out-dir", str(tmp_path)]) == 1
    assert "line 4, column" in capsys.readouterr().err


def test_verify_checks_hashes(tmp_path, capsys):
    assert run(["experiment", "--builtin", "model", "--deltas", "1e-2,1e-3", "--out-dir", str(tmp_path),
                "--deterministic"]) == 0
    path = tmp_path / "experiment.jsonl"
    assert run(["verify", "--quick", str(path)]) == 0
    out = capsys.readouterr().out
    assert "PASS config hash" in out and "FAIL" not in out
    csv_path = tmp_path / "experiment.csv"
    csv_path.write_text(csv_path.read_text().replace("0.01", "0.02", 1))
    assert run(["verify", "--quick", str(path)]) == 1


def test_env_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("SQUEEZEBOUND_OUT", str(tmp_path / "env"))
    assert run(["squeeze-bound", "--builtin", "ball", "--delta", "1e-3"]) == 0
    assert (tmp_path / "env" / "squeeze-bound.jsonl").exists()


def test_console_script_help():
    out = subprocess.run([sys.executable, "-m", "squeezebound.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for cmd in ("normal-form", "kobayashi", "indicatrix", "squeeze-bound", "experiment", "verify"):
        assert cmd in out.stdout
