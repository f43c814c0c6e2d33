from __future__ import annotations

import json
import subprocess
import sys

import pytest

from nisq_smtc.cli import main, parse_duration


@pytest.fixture
def bv6(tmp_path):
    path = tmp_path / "bv6.qasm"
    assert main(["gen", "bv:6:00111", "--out", str(path)]) == 0
    return path


def test_parse_duration():
    assert parse_duration("300s") == 300 and parse_duration("24h") == 86400
    assert parse_duration("5m") == 300 and parse_duration("2.5") == 2.5


def test_opt_writes_program_and_report(tmp_path, bv6):
    out, rep, smt = tmp_path / "o.qasm", tmp_path / "r.json", tmp_path / "p.smt2"
    code = main(["opt", "--in", str(bv6), "--machine", "8", "--policy", "rr", "--epsilon", "0.1",
                 "--probe-timeout", "300s", "--job-timeout", "24h", "--out", str(out),
                 "--report", str(rep), "--dump-smt", str(smt)])
    assert code == 0
    report = json.loads(rep.read_text())
    assert report["status"] == "near-optimal"
    assert report["eta"]["value"] < 1.1 and len(report["bounds"]) == 2
    assert report["probes"][0]["t_max"] == 625 and report["validation"]["ok"]
    assert report["emitted"]["swap_count"] == 0
    assert "qreg q[8];" in out.read_text() and "(declare-fun t_1 () Int)" in smt.read_text()


def test_heur_and_sim(tmp_path, bv6, capsys):
    out, rep = tmp_path / "h.qasm", tmp_path / "h.json"
    assert main(["heur", "--in", str(bv6), "--machine", "16", "--policy", "1bp", "--out", str(out),
                 "--report", str(rep), "--swap-decompose", "cx", "--no-emit-timing"]) == 0
    assert json.loads(rep.read_text())["details"]["refinement"] == "none"
    assert "swap" not in out.read_text() and "@t" not in out.read_text()
    capsys.readouterr()
    assert main(["sim", "--in", str(out)]) == 0
    dist = json.loads(capsys.readouterr().out)
    assert sum(p for k, p in dist.items() if k.startswith("00111")) == pytest.approx(1.0)


def test_infeasible_exit(tmp_path, bv6):
    cfg = tmp_path / "tight.json"
    cfg.write_text(json.dumps({"rows": 2, "cols": 4, "coherence_timeslots": 10}))
    assert main(["opt", "--in", str(bv6), "--machine", str(cfg), "--report", str(tmp_path / "r.json")]) == 2
    assert main(["heur", "--in", str(bv6), "--machine", str(cfg), "--out", str(tmp_path / "h.qasm")]) == 2


def test_timeout_exit(tmp_path, bv6):
    rep = tmp_path / "r.json"
    assert main(["opt", "--in", str(bv6), "--machine", "8", "--probe-timeout", "0", "--report", str(rep)]) == 4
    assert json.loads(rep.read_text())["status"] == "best-effort"


def test_validate_and_oracle(tmp_path, capsys):
    src = tmp_path / "two.qasm"
    src.write_text("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[1];\ncx q[1],q[0];\n")
    sched = {"mapping": {"0": [1, 1], "1": [1, 2]},
             "schedule": {"gates": [{"id": 1, "t": 1, "d": 8}, {"id": 2, "t": 9, "d": 8}]}}
    good = tmp_path / "good.json"
    good.write_text(json.dumps(sched))
    assert main(["validate", "--in", str(src), "--schedule", str(good), "--machine", "8"]) == 0
    sched["schedule"]["gates"][1]["t"] = 5
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(sched))
    capsys.readouterr()
    assert main(["validate", "--in", str(src), "--schedule", str(bad), "--machine", "8"]) == 3
    assert json.loads(capsys.readouterr().out)["violations"][0]["kind"] == "DependencyViolation"

    cfg = tmp_path / "g22.json"
    cfg.write_text(json.dumps({"rows": 2, "cols": 2, "coherence_timeslots": 100}))
    assert main(["oracle", "--in", str(src), "--machine", str(cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["optimal_makespan"] == 16


def test_gen_seed_and_errors(capsys):
    assert main(["gen", "random:4:10", "--seed", "3", "--measure-all"]) == 0
    first = capsys.readouterr().out
    assert main(["gen", "random:4:10:3", "--measure-all"]) == 0
    assert capsys.readouterr().out == first and "measure" in first
    assert main(["gen", "bv:6:001"]) == 1


def test_suite(tmp_path, capsys):
    code = main(["suite", "random:6:12", "bv:4:011", "--machines", "8", "16", "--jobs", "2",
                 "--report-dir", str(tmp_path)])
    assert code == 0
    assert len(json.loads((tmp_path / "suite.json").read_text())) == 4
    assert len(capsys.readouterr().out.strip().splitlines()) == 4


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "nisq_smtc.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "suite" in out.stdout
