import hashlib
import json
import shutil
import subprocess
import sys

import pytest

from edptune.cli import main
from edptune.workload import read_trace, write_trace, WorkloadTrace


def sha(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


@pytest.fixture
def work(tmp_path, monkeypatch, fixtures_dir):
    for name in ("fig1_machine.json", "simple_machine.json", "compute_bound_region.json"):
        shutil.copy(fixtures_dir / name, tmp_path / name)
    (tmp_path / "one_pstate.json").write_text(json.dumps({
        "pstates": [{"ghz": 2.0, "volt": 1.0}], "static_power_w": 50.0, "dyn_coeff": 5.0,
        "max_cores": 1, "serial_fraction": 0.0, "switch_latency_s": 0.0, "switch_energy_j": 0.0,
    }))
    monkeypatch.chdir(tmp_path)
    return tmp_path


M = ["--machine", "fig1_machine.json", "--region", "compute_bound_region.json"]


def gen(out="trace.csv", seed=42, drift=0.05):
    assert main(["gen", "--steps", "100", "--procs", "4", "--seed", str(seed),
                 "--drift", str(drift), "--out", out]) == 0


def test_gen_rows_and_reproducible(work, capsys):
    gen()
    assert "mean_imbalance=" in capsys.readouterr().out
    lines = (work / "trace.csv").read_text().splitlines()
    assert len(lines) == 1 + 400
    first = sha("trace.csv")
    gen()
    assert sha("trace.csv") == first


def test_gen_flat(work):
    gen(drift=0.0)
    t = read_trace("trace.csv")
    assert len({x for row in t.workloads for x in row}) == 1


def test_simulate_example(work):
    write_trace(WorkloadTrace(((1000.0, 500.0),)), work / "t2.csv")
    assert main(["simulate", "--machine", "one_pstate.json", "--region", "compute_bound_region.json",
                 "--trace", "t2.csv", "--out", "sum.json", "--slices", "sl.csv"]) == 0
    s = json.loads((work / "sum.json").read_text())
    assert s["total_energy_j"] == pytest.approx(57.5)
    assert s["total_time_s"] == pytest.approx(0.5)
    assert s["weight"] == 1 and s["edp"] == pytest.approx(28.75)
    assert {"n_steps", "n_procs", "manifest"} <= set(s)
    assert (work / "sl.csv").read_text().startswith("step,process,f_ghz,cores,active_s,wait_s,switch_s,energy_j\n")


def test_missing_machine_file(work, capsys):
    gen()
    code = main(["simulate", "--machine", "nothere.json", "--region", "compute_bound_region.json",
                 "--trace", "trace.csv", "--out", "s.json"])
    assert code == 2
    assert "nothere.json" in capsys.readouterr().err


def test_invalid_machine_exit_code(work, capsys):
    gen()
    (work / "bad.json").write_text(json.dumps({
        "pstates": [{"ghz": 2.0, "volt": 1.0}, {"ghz": 1.0, "volt": 1.0}],
        "static_power_w": 1, "dyn_coeff": 1, "max_cores": 1,
    }))
    assert main(["sweep", "--machine", "bad.json", "--region", "compute_bound_region.json",
                 "--trace", "trace.csv", "--out", "s.csv"]) == 2
    assert "strictly increasing frequency" in capsys.readouterr().err


def test_usage_error_exit_code(work):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--machine", "x.json"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_sweep_fig1_weight0(work):
    write_trace(WorkloadTrace(((1000.0,),)), work / "single.csv")
    assert main(["sweep", *M, "--trace", "single.csv", "--weight", "0", "--out", "sweep.csv"]) == 0
    lines = (work / "sweep.csv").read_text().splitlines()
    assert lines[0] == "f_ghz,volt,cores,energy_j,time_s,edp,rel_energy,rel_time"
    assert lines[-1] == "# best=1.5,1"
    assert json.loads((work / "sweep.csv.summary.json").read_text())["best"]["f_ghz"] == 1.5


def test_plan_then_simulate_balanced(work):
    gen(drift=0.0)
    assert main(["plan", *M, "--trace", "trace.csv", "--out", "plan.csv"]) == 0
    ref = json.loads((work / "plan.csv.summary.json").read_text())["reference"]
    assert main(["simulate", *M, "--trace", "trace.csv", "--schedule", "plan.csv", "--out", "dyn.json"]) == 0
    assert main(["sweep", *M, "--trace", "trace.csv", "--out", "sweep.csv"]) == 0
    static = json.loads((work / "sweep.csv.summary.json").read_text())
    dyn = json.loads((work / "dyn.json").read_text())
    assert static["best"] == ref
    assert dyn["total_energy_j"] == pytest.approx(static["total_energy_j"], rel=1e-12)


def test_train_run_matches_plan_simulate(work):
    gen()
    assert main(["plan", *M, "--trace", "trace.csv", "--out", "plan.csv"]) == 0
    assert main(["simulate", *M, "--trace", "trace.csv", "--schedule", "plan.csv", "--out", "dyn.json"]) == 0
    assert main(["train", *M, "--trace", "trace.csv", "--dedupe-eps", "0", "--out", "model.json"]) == 0
    assert main(["run", *M, "--trace", "trace.csv", "--model", "model.json", "--out", "prod.json"]) == 0
    dyn = json.loads((work / "dyn.json").read_text())
    prod = json.loads((work / "prod.json").read_text())
    assert prod["edp"] == pytest.approx(dyn["edp"], rel=1e-12)
    model = json.loads((work / "model.json").read_text())
    assert set(model) == {"n_procs", "reference", "lambda", "weight", "entries", "fingerprint"}


def test_run_warns_on_fingerprint_mismatch(work, recwarn):
    gen()
    assert main(["train", *M, "--trace", "trace.csv", "--out", "model.json"]) == 0
    assert main(["run", "--machine", "simple_machine.json", "--region", "compute_bound_region.json",
                 "--trace", "trace.csv", "--model", "model.json", "--out", "prod.json"]) == 0
    assert any("fingerprint" in str(w.message) for w in recwarn)


def test_report_identity_and_savings(work, capsys):
    gen()
    assert main(["sweep", *M, "--trace", "trace.csv", "--out", "sweep.csv"]) == 0
    assert main(["plan", *M, "--trace", "trace.csv", "--out", "plan.csv"]) == 0
    assert main(["report", "sweep.csv.summary.json", "sweep.csv.summary.json", "--out", "same.csv"]) == 0
    rows = (work / "same.csv").read_text().splitlines()[1:]
    assert all(r.split(",")[-3:] == ["0.0", "0.0", "0.0"] for r in rows)

    assert main(["report", "sweep.csv.summary.json", "plan.csv.summary.json", "--out", "rep.csv",
                 "--text", "rep.txt"]) == 0
    last = (work / "rep.csv").read_text().splitlines()[-1].split(",")
    energy_saving, time_change = float(last[4]), float(last[5])
    assert energy_saving > 0
    assert abs(time_change) <= 1e-9
    assert "model-internal" in (work / "rep.txt").read_text()


def test_report_direct_ratio(work):
    man = {"args": {}, "input_sha256": {"machine": "a", "region": "b", "trace": "c"}}
    for name, e in (("a.json", 100.0), ("b.json", 90.0)):
        (work / name).write_text(json.dumps({"total_energy_j": e, "total_time_s": 10.0, "weight": 1,
                                             "manifest": man}))
    assert main(["report", "a.json", "b.json", "--out", "r.csv"]) == 0
    last = (work / "r.csv").read_text().splitlines()[-1].split(",")
    assert float(last[4]) == pytest.approx(0.10)


def test_report_incompatible(work, capsys):
    gen(out="t1.csv", seed=1)
    gen(out="t2.csv", seed=2)
    assert main(["simulate", *M, "--trace", "t1.csv", "--out", "a.json"]) == 0
    assert main(["simulate", *M, "--trace", "t2.csv", "--out", "b.json"]) == 0
    assert main(["report", "a.json", "b.json", "--out", "r.csv"]) == 2
    assert "trace" in capsys.readouterr().err


COMMAND_LINES = [
    (["gen", "--steps", "50", "--procs", "3", "--seed", "7", "--out", "t.csv"], "t.csv.summary.json"),
    (["simulate", *M, "--trace", "t.csv", "--out", "sim.json", "--slices", "sim.csv"], "sim.json"),
    (["sweep", *M, "--trace", "t.csv", "--weight", "2", "--out", "sw.csv"], "sw.csv.summary.json"),
    (["plan", *M, "--trace", "t.csv", "--out", "plan.csv"], "plan.csv.summary.json"),
    (["train", *M, "--trace", "t.csv", "--out", "model.json"], "model.json.summary.json"),
    (["run", *M, "--trace", "t.csv", "--model", "model.json", "--out", "run.json"], "run.json"),
    (["report", "sw.csv.summary.json", "plan.csv.summary.json", "run.json", "--out", "rep.csv"],
     "rep.csv.summary.json"),
]


def test_replay_every_command_byte_identical(work, capsys):
    for argv, _ in COMMAND_LINES:
        assert main(argv) == 0
    outputs = sorted(p.name for p in work.iterdir() if p.suffix in (".csv", ".json")
                     and p.name not in ("fig1_machine.json", "simple_machine.json",
                                        "compute_bound_region.json", "one_pstate.json"))
    before = {name: sha(work / name) for name in outputs}
    for name in outputs:
        (work / name).rename(work / (name + ".orig"))
    for _, summary in COMMAND_LINES:
        (work / (summary + ".orig")).rename(work / summary)
        assert main(["replay", summary]) == 0
    assert {name: sha(work / name) for name in outputs} == before


def test_console_script(work):
    proc = subprocess.run([sys.executable, "-m", "edptune.cli", "gen", "--steps", "3", "--procs", "2",
                           "--out", "x.csv"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (work / "x.csv").exists()
