import csv
import io
import json
import math
import subprocess
import sys

import pytest

from quartic_duality.cli import dump, main, read_config, tau_grid

BASE = ["--alpha", "2", "--mu", "1", "--nu", "1"]
CASE_A = BASE + ["--a", "1", "--b", "2", "--tau-theta", "5"]
CASE_B = BASE + ["--a", "1", "--b", "1.1", "--tau-theta", "2.05"]
MIXED = BASE + ["--a", "1", "--b", "2", "--tau-theta", "2"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_zero_load(capsys):
    code, out, _ = run(capsys, "solve", *BASE, "--tau", "0")
    assert code == 0
    rep = json.loads(out)
    assert rep["regime"] == "ZeroLoad"
    mins = [c for c in rep["critical_points"] if c["label"] == "GlobalMin"]
    assert sorted(c["u_bar"] for c in mins) == pytest.approx([2 - math.sqrt(2), 2 + math.sqrt(2)])
    assert all(c["p_value"] == pytest.approx(-0.5, abs=1e-12) for c in mins)


def test_solve_supercritical(capsys):
    code, out, _ = run(capsys, "solve", *BASE, "--tau", "1", "--brute")
    rep = json.loads(out)
    assert code == 0 and rep["verified"]
    (cp,) = rep["critical_points"]
    assert cp["label"] == "GlobalMin"
    assert abs(cp["u_bar"] - rep["brute_force_min"]["y"]) <= 1e-4


def test_solve_single_well(capsys):
    code, _, err = run(capsys, "solve", "--alpha", "1", "--mu", "1", "--nu", "1", "--tau", "0")
    assert code == 2 and "NotDoubleWell" in err


def test_solve_missing_parameter(capsys):
    code, _, err = run(capsys, "solve", *BASE)
    assert code == 2 and "tau" in err


def test_solve_writes_files(capsys, tmp_path):
    run(capsys, "solve", *BASE, "--tau", "0.3", "--out", str(tmp_path))
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["regime"] == "SubCritical"
    rows = list(csv.reader(open(tmp_path / "roots.csv")))
    assert rows[0] == ["branch", "sigma", "double"] and len(rows) == 4


def test_config_and_overrides(capsys, tmp_path):
    cfg = tmp_path / "params.cfg"
    cfg.write_text("[material]\nalpha = 2\nmu = 1\nnu = 1\n[load]\ntau = 0.3\n")
    _, from_file, _ = run(capsys, "solve", "--config", str(cfg))
    _, from_flags, _ = run(capsys, "solve", *BASE, "--tau", "0.3")
    assert from_file == from_flags
    _, overridden, _ = run(capsys, "solve", "--config", str(cfg), "--tau", "1")
    assert json.loads(overridden)["regime"] == "SuperCritical"
    assert read_config(cfg) == {"alpha": "2", "mu": "1", "nu": "1", "tau": "0.3"}


def test_json_round_trip(capsys, tmp_path):
    run(capsys, "solve", *BASE, "--tau", "0.123456789012345678", "--out", str(tmp_path / "one"))
    params = json.loads((tmp_path / "one" / "report.json").read_text())["params"]
    cfg = tmp_path / "again.cfg"
    cfg.write_text("".join(f"{k} = {v!r}\n" for k, v in params.items()))
    run(capsys, "solve", "--config", str(cfg), "--out", str(tmp_path / "two"))
    assert (tmp_path / "one" / "report.json").read_bytes() == (tmp_path / "two" / "report.json").read_bytes()


def test_nan_becomes_null():
    assert json.loads(dump({"x": float("nan"), "y": [float("inf"), 1.5]})) == {"x": None, "y": [None, 1.5]}


def test_tau_grid():
    assert tau_grid(1.0, 0.0, 0.1).size == 0
    g = tau_grid(0.0, 1.0, 1e-3)
    assert g.size == 1001 and g[-1] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        tau_grid(0.0, 1.0, 0.0)


def sweep_rows(capsys, *argv):
    code, out, _ = run(capsys, "sweep", *BASE, *argv)
    assert code == 0
    return list(csv.DictReader(io.StringIO(out)))


def test_sweep_transition(capsys):
    rows = sweep_rows(capsys, "--tau-min", "0", "--tau-max", "1", "--tau-step", "0.01")
    counts = [int(r["root_count"]) for r in rows]
    taus = [float(r["tau"]) for r in rows]
    assert counts[0] == 2
    edge = math.sqrt(8 / 27)
    assert all(c == 3 for t, c in zip(taus[1:], counts[1:]) if t < edge)
    assert all(c == 1 for t, c in zip(taus, counts) if t > edge)
    assert all(r["ordering"] == "p3>p2>p1" for r in rows if r["regime"] == "SubCritical")


def test_sweep_empty_range(capsys):
    code, out, _ = run(capsys, "sweep", *BASE, "--tau-min", "1", "--tau-max", "0")
    assert code == 0
    assert out.splitlines() == [",".join(next(csv.reader(io.StringIO(out))))]
    assert out.startswith("tau,tau_sq,regime,root_count")


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", *BASE, "--tau-min", "0.5", "--tau-max", "0.6",
                       "--tau-step", "0.1", "--format", "json")
    rows = json.loads(out)
    assert [r["regime"] for r in rows] == ["SubCritical", "SuperCritical"]


def test_fgraph(capsys, tmp_path):
    code, out, _ = run(capsys, "fgraph", *BASE, "--points", "11", "--out", str(tmp_path))
    assert code == 0 and len(out.splitlines()) == 12
    marks = list(csv.DictReader(open(tmp_path / "f_landmarks.csv")))
    rho = next(m for m in marks if m["landmark"] == "rho")
    assert float(rho["f"]) == pytest.approx(8 / 27)


def test_radial_case_a(capsys, tmp_path):
    code, out, _ = run(capsys, "radial", *CASE_A, "--samples", "10", "--seed", "7", "--out", str(tmp_path))
    rep = json.loads(out)
    assert code == 0 and rep["regime"] == "CaseA" and rep["seed"] == 7
    (sol,) = rep["solutions"]
    assert sol["duality_ok"] and sol["sampling"]["ok"]
    assert (tmp_path / "fields_zeta_upper.csv").read_text().startswith("r,value\n")


def test_radial_case_b(capsys):
    code, out, _ = run(capsys, "radial", *CASE_B, "--grid-nodes", "513")
    rep = json.loads(out)
    assert code == 0 and rep["ordering_ok"] and len(rep["solutions"]) == 3


def test_radial_mixed(capsys):
    code, _, _ = run(capsys, "radial", *MIXED)
    assert code == 3


def test_radial_deterministic(capsys):
    first = run(capsys, "radial", *CASE_A, "--samples", "5", "--seed", "3", "--grid-nodes", "257")[1]
    second = run(capsys, "radial", *CASE_A, "--samples", "5", "--seed", "3", "--grid-nodes", "257")[1]
    assert first == second


def test_counterexample_blowup(capsys, tmp_path):
    code, out, _ = run(capsys, "counterexample", "blowup", *CASE_A, "--out", str(tmp_path))
    rep = json.loads(out)
    assert code == 0 and rep["report"]["increasing"]
    ladder = list(csv.reader(open(tmp_path / "ladder_blowup.csv")))
    assert ladder[0][0] == "parameter" and len(ladder) == 6


def test_counterexample_mix(capsys, tmp_path):
    code, out, _ = run(capsys, "counterexample", "mix", *CASE_B, "--out", str(tmp_path))
    rep = json.loads(out)
    assert code == 0 and all(r["gap"] > 0 for r in rep["report"]["rows"])
    ladder = list(csv.reader(open(tmp_path / "ladder_mix.csv")))
    assert ladder[0] == ["parameter", "gap", "norm"]


def test_counterexample_spike_and_witness(capsys):
    assert run(capsys, "counterexample", "spike", *CASE_B, "--eps", "0.05", "0.01")[0] == 0
    code, out, _ = run(capsys, "counterexample", "domgresit", *CASE_A)
    assert code == 0 and json.loads(out)["report"]["witness"]["verdict"] == "Diverges"


def test_counterexample_wrong_regime(capsys):
    assert run(capsys, "counterexample", "mix", *CASE_A)[0] == 3


def test_warning_for_large_alpha(capsys):
    _, out, _ = run(capsys, "solve", "--alpha", "3", "--mu", "1", "--nu", "1", "--tau", "0")
    assert json.loads(out)["warnings"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quartic_duality", "solve", *BASE, "--tau", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["regime"] == "SuperCritical"
