import csv
import json
from pathlib import Path

import pytest

from antijam_sim import cli
from antijam_sim.engine import SimConfig, read_trace_csv
from antijam_sim.metrics import MetricsReport, band_fraction, convergence_slot, throughput

DATA = Path(__file__).parent / "data"


def run_cli(*args):
    return cli.main([str(a) for a in args])


def test_run_writes_round_trippable_outputs(tmp_path):
    assert run_cli("run", "--n", 200, "--steps", 5000, "--seed", 3, "--out", tmp_path) == 0
    rep = MetricsReport.from_json((tmp_path / "report.json").read_text())
    cfg = SimConfig.from_dict(rep.config)
    tr = read_trace_csv(tmp_path / "trace.csv", n=cfg.n)
    assert len(tr) == 5000
    assert throughput(tr).value == rep.throughput
    assert convergence_slot(tr) == rep.convergence_slot
    assert band_fraction(tr, cfg.adversary.epsilon) == rep.band_fraction


def test_run_defaults(tmp_path):
    assert run_cli("run", "--out", tmp_path) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["config"]["n"] == 1000 and rep["config"]["steps"] == 100_000
    assert rep["config"]["strategy"] == "busy-det" and rep["config"]["T"] == 100


def test_same_seed_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert run_cli("run", "--n", 100, "--steps", 4000, "--seed", 7, "--out", tmp_path / d) == 0
    for name in ("trace.csv", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_dcf_under_heavy_jamming(tmp_path):
    code = run_cli("run", "--protocol", "dcf", "--strategy", "busy-det", "--epsilon", 0.1,
                   "--n", 200, "--steps", 20000, "--out", tmp_path)
    assert code == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["throughput"] <= 0.02
    assert rep["convergence_slot"] is None and rep["band_fraction"] is None
    assert rep["config"]["cw_min"] == 15 and "gamma" not in rep["config"]


def test_config_file_with_override(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"n": 30, "steps": 1000, "epsilon": 0.3, "strategy": "idle-det"}))
    assert run_cli("run", "--config", conf, "--epsilon", 0.7, "--out", tmp_path / "o") == 0
    got = json.loads((tmp_path / "o" / "report.json").read_text())["config"]
    assert (got["n"], got["steps"], got["epsilon"], got["strategy"]) == (30, 1000, 0.7, "idle-det")


@pytest.mark.parametrize("args", [
    ("--epsilon", 0.0),
    ("--epsilon", 1.5),
    ("--n", 0),
    ("--window-T", 0),
    ("--gamma", -0.1),
    ("--p-hat", 1.0),
    ("--protocol", "dcf", "--cw-min", 31, "--cw-max", 15),
])
def test_bad_config_exit_code(tmp_path, args, capsys):
    assert run_cli("run", *args, "--steps", 10, "--out", tmp_path) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err
    assert not (tmp_path / "trace.csv").exists()


def test_bad_config_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run_cli("run", "--config", bad, "--out", tmp_path) == cli.EXIT_CONFIG
    assert run_cli("run", "--config", tmp_path / "missing.json", "--out", tmp_path) == cli.EXIT_CONFIG
    bad.write_text(json.dumps({"n": 5, "bogus": 1}))
    assert run_cli("run", "--config", bad, "--out", tmp_path) == cli.EXIT_CONFIG


def test_large_p_hat_warns(tmp_path):
    with pytest.warns(Warning):
        assert run_cli("run", "--p-hat", 0.1, "--n", 10, "--steps", 100, "--out", tmp_path) == 0


def test_verify_quick():
    assert run_cli("verify", "--quick") == 0


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_sweep_ordering_and_determinism(tmp_path):
    args = ("sweep", "--axis", "n", "--values", "50,10,30", "--reps", 3, "--steps", 2000, "--seed", 2)
    assert run_cli(*args, "--out", tmp_path / "a") == 0
    assert run_cli(*args, "--workers", 2, "--out", tmp_path / "b") == 0
    a = (tmp_path / "a" / "sweep.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep.csv").read_bytes()
    rows = read_rows(tmp_path / "a" / "sweep.csv")
    assert [(r["value"], r["repetition"]) for r in rows] == [
        (v, str(k)) for v in ("50", "10", "30") for k in range(3)]
    assert [r["n"] for r in rows] == [r["value"] for r in rows]
    assert len({r["seed"] for r in rows}) == 9
    for r in rows:
        float(r["throughput"])


def test_sweep_golden(tmp_path):
    args = ("sweep", "--axis", "epsilon", "--values", "0.3,0.5", "--reps", 2, "--n", 100,
            "--steps", 3000, "--seed", 5, "--out", tmp_path)
    assert run_cli(*args) == 0
    assert (tmp_path / "sweep.csv").read_text() == (DATA / "golden_sweep.csv").read_text()


def test_sweep_strategy_axis(tmp_path):
    assert run_cli("sweep", "--axis", "strategy", "--values", "none,idle-det", "--reps", 1,
                   "--n", 20, "--steps", 500, "--out", tmp_path) == 0
    assert [r["strategy"] for r in read_rows(tmp_path / "sweep.csv")] == ["none", "idle-det"]


def test_sweep_bad_axis_value(tmp_path):
    assert run_cli("sweep", "--axis", "n", "--values", "abc", "--out", tmp_path) == cli.EXIT_CONFIG
    assert run_cli("sweep", "--axis", "epsilon", "--values", "0.5,2", "--steps", 10,
                   "--out", tmp_path) == cli.EXIT_CONFIG


def test_snapshots(tmp_path):
    assert run_cli("run", "--n", 7, "--steps", 100, "--snapshot-every", 25, "--out", tmp_path) == 0
    rows = read_rows(tmp_path / "snapshots.csv")
    assert sorted({int(r["t"]) for r in rows}) == [0, 25, 50, 75]
    assert len(rows) == 4 * 7
    assert all(float(r["p_v"]) <= 1 / 24 + 1e-15 for r in rows)
    # snapshotting must not change the trace
    assert run_cli("run", "--n", 7, "--steps", 100, "--out", tmp_path / "plain") == 0
    assert (tmp_path / "trace.csv").read_bytes() == (tmp_path / "plain" / "trace.csv").read_bytes()
