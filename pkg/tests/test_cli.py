import json

import numpy as np
import pytest

from exthl import cli
from exthl.verify import metric_override, run_suite

CYCLOTRON = """
[units]
m = 1.0
[field]
kind = "uniform-magnetic"
B = [0.0, 0.0, 1.0]
[initial]
q = [2.0647416048350555, 0.0, 0.0]
v = [0.0, -0.9, 0.0]
[integrator]
s_end = 6.283185307179586
[kernel]
tau = [0.5, 1.0, 2.0, 5.0, 10.0]
[boost]
beta = [0.6, 0.0, 0.0]
"""


def _write(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def _run(*args):
    return cli.main(list(args))


def test_trajectory_outputs(tmp_path):
    cfg = _write(tmp_path, CYCLOTRON)
    out = tmp_path / "out"
    assert _run("trajectory", "--config", cfg, "--out", str(out)) == 0
    for name in ("trajectory_extended.csv", "trajectory_reparameterized.csv", "trajectory_conventional.csv",
                 "trajectory.json", "config.toml"):
        assert (out / name).exists()
    summary = json.loads((out / "trajectory.json").read_text())
    assert summary["max_constraint_residual"] < 1e-9
    assert summary["equivalence_q_rel"] < 1e-6
    # orbit angular frequency from the conventional CSV
    data = np.loadtxt(out / "trajectory_conventional.csv", delimiter=",", skiprows=1)
    t, x, y = data[:, 0], data[:, 1], data[:, 2]
    slope = np.polyfit(t, np.unwrap(np.arctan2(-y, x)), 1)[0]
    gamma = 1 / np.sqrt(1 - 0.81)
    assert abs(slope - 1 / gamma) * gamma < 1e-6


def test_outputs_are_deterministic(tmp_path):
    cfg = _write(tmp_path, CYCLOTRON)
    for sub in ("trajectory", "kernel", "boost"):
        assert _run(sub, "--config", cfg, "--out", str(tmp_path / "a")) == 0
        assert _run(sub, "--config", cfg, "--out", str(tmp_path / "b")) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()


def test_config_copy_roundtrips(tmp_path):
    cfg = _write(tmp_path, CYCLOTRON)
    assert _run("boost", "--config", cfg, "--out", str(tmp_path / "a")) == 0
    copy = str(tmp_path / "a" / "config.toml")
    assert _run("boost", "--config", copy, "--out", str(tmp_path / "b")) == 0
    assert (tmp_path / "a" / "config.toml").read_text() == (tmp_path / "b" / "config.toml").read_text()
    assert (tmp_path / "a" / "boost.json").read_bytes() == (tmp_path / "b" / "boost.json").read_bytes()


def test_kernel_table(tmp_path, monkeypatch):
    monkeypatch.setenv("EXTHL_NUM_THREADS", "2")
    cfg = _write(tmp_path, CYCLOTRON)
    assert _run("kernel", "--config", cfg, "--out", str(tmp_path)) == 0
    summary = json.loads((tmp_path / "kernel.json").read_text())
    assert summary["n_rows"] == 5
    assert summary["max_rel_discrepancy"] < 1e-5
    rows = (tmp_path / "kernel.csv").read_text().splitlines()
    assert len(rows) == 6


def test_thread_env_validation(tmp_path, monkeypatch):
    monkeypatch.setenv("EXTHL_NUM_THREADS", "zero")
    assert _run("kernel", "--config", _write(tmp_path, CYCLOTRON), "--out", str(tmp_path)) == 2


def test_boost_at_rest(tmp_path):
    cfg = _write(tmp_path, "[units]\nm = 1.0\n[boost]\nbeta = [0.6, 0.0, 0.0]\n")
    assert _run("boost", "--config", cfg, "--out", str(tmp_path)) == 0
    rep = json.loads((tmp_path / "boost.json").read_text())
    assert rep["after"]["p_kinetic"] == pytest.approx([-0.75, 0.0, 0.0], abs=1e-15)
    assert rep["after"]["e_kinetic"] == pytest.approx(1.25)
    assert rep["h1_invariance"] == "PASS" and rep["canonical"] == "PASS"


@pytest.mark.parametrize("text,code", [
    ("[units]\nc = 1.0\n", 2),
    ("[units]\nm = 1.0\n[boost]\nbeta = [0.6, 0.9, 0.0]\n", 2),
    ("[units]\nm = 1.0\n[boost]\nbeta = [1.0, 0.0, 0.0]\n", 2),
    ("[units]\nm = 1.0\n[kernel]\ntau = [0.0, 1.0]\n", 4),
    ("[units]\nm = 1.0\n[kernel]\ntau = [-1.0]\n", 4),
    ("[units]\nm = 1.0\n[kernel]\nseparations = [[1.0, 2.0, 0.0, 0.0]]\n", 4),
    ("[units]\nm = 1.0\n[kernel]\nseparations = [[1.0, 1.0, 0.0, 0.0]]\n", 4),
])
def test_exit_codes(tmp_path, text, code):
    cmd = "boost" if "boost" in text else ("kernel" if "kernel" in text else "trajectory")
    assert _run(cmd, "--config", _write(tmp_path, text), "--out", str(tmp_path / "o")) == code


def test_missing_sections(tmp_path):
    cfg = _write(tmp_path, "[units]\nm = 1.0\n")
    assert _run("kernel", "--config", cfg, "--out", str(tmp_path)) == 2
    assert _run("boost", "--config", cfg, "--out", str(tmp_path)) == 2


def test_integration_failure_exit_code(tmp_path):
    cfg = _write(tmp_path, CYCLOTRON.replace("[integrator]\n", "[integrator]\nmax_steps = 3\n"))
    assert _run("trajectory", "--config", cfg, "--out", str(tmp_path)) == 3


def test_verify_minkowski_and_report(tmp_path, capsys):
    assert _run("verify", "--suite", "minkowski", "--out", str(tmp_path)) == 0
    doc = json.loads((tmp_path / "verify_report.json").read_text())
    assert doc["passed"] is True
    assert doc["suites"][0]["suite"] == "minkowski"
    assert "all invariants passed" in capsys.readouterr().out


def test_metric_mutation_is_detected():
    with metric_override(np.diag([1.0, 1.0, 1.0, 1.0])):
        rep = run_suite("minkowski")
    assert not rep.passed
    assert "minkowski.mass_shell_metric" in rep.failures
    assert run_suite("minkowski").passed
