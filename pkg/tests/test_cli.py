import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from occusim.bn import Cpt, NetworkSpec, VariableSpec, load_network, sample_records
from occusim.cli import main
from occusim.io import parse_plot_data, read_summary


def run(*argv):
    return main([str(a) for a in argv])


def test_validate_shipped(scenarios_dir, capsys):
    files = sorted(scenarios_dir.iterdir())
    assert run("validate", *files) == 0
    assert capsys.readouterr().out.count("OK ") == len(files)


def test_validate_bad_row(scenarios_dir, tmp_path, capsys):
    doc = json.loads((scenarios_dir / "door_dbn.json").read_text())
    cpt = doc["cpts"][0]
    key = next(iter(cpt["rows"]))
    row = cpt["rows"][key]
    row[0] += 1.1 - sum(row)
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    assert run("validate", p) == 1
    out = capsys.readouterr().out
    assert cpt["child"] in out and "1.1" in out


def test_validate_missing_calendar(scenarios_dir, tmp_path, capsys):
    doc = json.loads((scenarios_dir / "workday1.json").read_text())
    doc["calendar"] = str(tmp_path / "gone.csv")
    doc["dbn"] = "builtin:door"
    p = tmp_path / "s.json"
    p.write_text(json.dumps(doc))
    assert run("validate", p) == 1
    assert "FileNotFound" in capsys.readouterr().out


def test_simulate_twice_identical(scenarios_dir, tmp_path):
    cfg = scenarios_dir / "workday1.json"
    assert run("simulate", cfg, "--out", tmp_path / "a") == 0
    assert run("simulate", cfg, "--out", tmp_path / "b") == 0
    a = (tmp_path / "a" / "trace.csv").read_bytes()
    assert a == (tmp_path / "b" / "trace.csv").read_bytes()
    assert len(a.decode().splitlines()) == 25
    man = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert man["master_seed"] == 42 and man["finished_at"]


def test_simulate_seed_override(scenarios_dir, tmp_path):
    assert run("simulate", scenarios_dir / "workday1.json", "--seed", 5, "--out", tmp_path) == 0
    assert json.loads((tmp_path / "manifest.json").read_text())["master_seed"] == 5


def test_mc_zero_runs_is_usage_error(scenarios_dir):
    with pytest.raises(SystemExit) as exc:
        run("mc", scenarios_dir / "workday1.json", "--runs", 0)
    assert exc.value.code == 2


def test_mc_workers_byte_identical(scenarios_dir, tmp_path):
    cfg = scenarios_dir / "workday1.json"
    assert run("mc", cfg, "--runs", 40, "--workers", 1, "--out", tmp_path / "w1") == 0
    assert run("mc", cfg, "--runs", 40, "--workers", 8, "--out", tmp_path / "w8") == 0
    assert (tmp_path / "w1" / "summary.json").read_bytes() == (tmp_path / "w8" / "summary.json").read_bytes()


def test_mc_use_ordering_and_traces(scenarios_dir, tmp_path):
    assert run("mc", scenarios_dir / "workday1.json", "--runs", 100, "--out", tmp_path, "--traces") == 0
    s = read_summary(tmp_path / "summary.json")
    assert len(list((tmp_path / "traces").iterdir())) == 100
    use = s.door_use()
    mean = {a: np.mean([u for u, act in zip(use, s.activities) if act == a]) for a in ("lunch", "busy", "free")}
    assert mean["lunch"] < mean["busy"] < mean["free"]


def test_plot_data_from_summary_and_trace(scenarios_dir, tmp_path, capsys):
    run("mc", scenarios_dir / "workday2.json", "--runs", 10, "--out", tmp_path)
    assert run("plot-data", tmp_path / "summary.json", "--out", tmp_path / "s.dat") == 0
    cols, rows = parse_plot_data((tmp_path / "s.dat").read_text())
    assert len(rows) == 24 and len(cols) == 8
    assert all(sum(r[1:5]) == pytest.approx(1.0, abs=1e-5) for r in rows)
    run("simulate", scenarios_dir / "workday2.json", "--out", tmp_path)
    capsys.readouterr()
    assert run("plot-data", tmp_path / "trace.csv") == 0
    cols, _ = parse_plot_data(capsys.readouterr().out)
    assert cols == ("step", "hour", "quantity", "value")


def test_plot_data_malformed(tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"runs": 1}')
    assert run("plot-data", p) == 2


def learn_fixture(tmp_path, n):
    A = VariableSpec("A", ("a0", "a1"))
    B = VariableSpec("B", ("b0", "b1", "b2"))
    truth = NetworkSpec(
        (A, B),
        (
            Cpt("A", (), {(): (0.4, 0.6)}),
            Cpt("B", ("A",), {("a0",): (0.7, 0.2, 0.1), ("a1",): (0.1, 0.3, 0.6)}),
        ),
    )
    structure = tmp_path / "structure.json"
    doc = {"variables": [{"name": v.name, "domain": list(v.domain)} for v in truth.variables],
           "cpts": [{"child": "A", "parents": []}, {"child": "B", "parents": ["A"]}]}
    structure.write_text(json.dumps(doc))
    obs = tmp_path / "obs.csv"
    with open(obs, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["A", "B"])
        w.writeheader()
        w.writerows(sample_records(truth, n, np.random.default_rng(0)) if n else [])
    return truth, structure, obs


def test_learn_recovers(tmp_path):
    truth, structure, obs = learn_fixture(tmp_path, 10_000)
    assert run("learn", structure, obs, "--out", tmp_path / "l.json") == 0
    learned = load_network(tmp_path / "l.json")
    for c in truth.cpts:
        for key, row in c.table.items():
            assert np.abs(np.subtract(row, learned.cpt(c.child).table[key])).sum() <= 0.05


def test_learn_empty_gives_uniform(tmp_path):
    _, structure, obs = learn_fixture(tmp_path, 0)
    assert run("learn", structure, obs, "--out", tmp_path / "l.json") == 0
    learned = load_network(tmp_path / "l.json")
    assert learned.cpt("B").table[("a0",)] == pytest.approx((1 / 3,) * 3)


def test_learn_column_mismatch(tmp_path):
    _, structure, obs = learn_fixture(tmp_path, 5)
    obs.write_text("A,Z\na0,b0\n")
    assert run("learn", structure, obs) == 2


def test_learn_bad_label_reports_line(tmp_path, capsys):
    _, structure, obs = learn_fixture(tmp_path, 0)
    obs.write_text("A,B\na0,b0\na9,b1\n")
    assert run("learn", structure, obs, "--out", tmp_path / "l.json") == 2
    assert "line 3" in capsys.readouterr().err


def test_runtime_error_exit_code(scenarios_dir, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run("simulate", scenarios_dir / "workday1.json", "--out", blocker) == 3


def test_simulation_error_exit_code(scenarios_dir, tmp_path, monkeypatch):
    from occusim import cli
    from occusim.cosim import SimulationError

    def boom(cfg):
        raise SimulationError(4, RuntimeError("solver blew up"))

    monkeypatch.setattr(cli, "run_simulation", boom)
    assert run("simulate", scenarios_dir / "workday1.json", "--out", tmp_path) == 3


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "occusim", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "occusim" in out.stdout
