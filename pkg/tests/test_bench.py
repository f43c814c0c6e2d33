from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nisq_smtc.bench import BenchSpec, gen_bv, gen_layered, gen_random, run_one, run_suite
from nisq_smtc.circuit import GateKind
from nisq_smtc.errors import ConfigError, LengthMismatch


def kinds(c):
    return [g.kind for g in c.gates]


def test_bv6():
    c = gen_bv(6, "00111")
    cx = [g for g in c.gates if g.is_cnot]
    assert [g.control for g in cx] == [2, 3, 4] and {g.target for g in cx} == {5}


def test_bv_trivial_and_errors():
    assert not any(g.is_cnot for g in gen_bv(2, "0").gates)
    for n, h in [(6, "0011"), (1, ""), (3, "0a")]:
        with pytest.raises(LengthMismatch):
            gen_bv(n, h)


@given(st.text(alphabet="01", min_size=1, max_size=10))
def test_bv_gate_accounting(hidden):
    n = len(hidden) + 1
    c = gen_bv(n, hidden)
    k = kinds(c)
    assert k.count(GateKind.CNOT) == hidden.count("1")
    assert k.count(GateKind.H) == 2 * (n - 1) + 1
    assert k.count(GateKind.X) == 1 and k.count(GateKind.MEASURE) == n
    assert k[:2] == [GateKind.X, GateKind.H]


def test_random_generator():
    assert len(gen_random(2, 0, 5)) == 0
    assert gen_random(8, 64, 1) == gen_random(8, 64, 1)
    assert gen_random(8, 64, 1) != gen_random(8, 64, 2)
    big = gen_random(8, 10000, 3)
    frac = sum(g.is_cnot for g in big.gates) / 10000
    assert abs(frac - 1 / 9) <= 0.02
    m = gen_random(3, 4, 0, measure_all=True)
    assert [g.cbit for g in m.gates[-3:]] == [0, 1, 2]


def test_random_single_qubit_program():
    assert not any(g.is_cnot for g in gen_random(1, 50, 0).gates)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 20), st.integers(1, 8), st.integers(0, 1000))
def test_layered_generator(q, depth, seed):
    c = gen_layered(q, depth, seed)
    assert len(c) == q * depth
    assert c == gen_layered(q, depth, seed)


def test_benchspec_parse():
    assert BenchSpec.parse("bv:6:00111") == BenchSpec("bv", (6, "00111"))
    assert BenchSpec.parse("random:8:64:1").build() == gen_random(8, 64, 1)
    assert str(BenchSpec.parse("layered:16:4:7")) == "layered:16:4:7"
    for bad in ("bv:6", "random:8:x:1", "grover:3"):
        with pytest.raises(ConfigError):
            BenchSpec.parse(bad)


def test_run_suite_single_cell(tmp_path):
    reports = run_suite(["random:6:20:1"], ["8"], "heur", out_dir=tmp_path)
    assert len(reports) == 1
    r = reports[0]
    assert r.error is None and r.valid and r.makespan == r.validated_makespan
    assert json.loads((tmp_path / "suite.json").read_text())[0]["spec"] == "random:6:20:1"
    assert (tmp_path / "suite.csv").read_text().startswith("spec,machine,")


def test_bv_sweep_opt():
    reports = run_suite([f"bv:{n}:{'0' * (n - 2)}1" for n in (4, 6, 8)], ["16"], "opt",
                        probe_timeout=60)
    assert [r.status for r in reports] == ["near-optimal"] * 3
    assert all(r.compile_time < 60 and r.valid for r in reports)
    assert all(r.makespan == r.validated_makespan for r in reports)


def test_layered_fits_recorded_in_parallel():
    reports = run_suite(["layered:16:4:3", "layered:16:2:3"], ["16"], "heur", jobs=2)
    assert [r.spec for r in reports] == ["layered:16:2:3", "layered:16:4:3"]
    assert all(r.fits_coherence is not None and r.valid for r in reports)


def test_failed_cell_recorded():
    r = run_one("random:9:5:0", "8", "heur")
    assert r.status == "error" and "TooManyQubits" in r.error
