from __future__ import annotations

import pytest

from nisq_smtc.bench import gen_bv
from nisq_smtc.circuit import Circuit
from nisq_smtc.errors import TooManyQubits
from nisq_smtc.simulator import simulate, total_variation

HDR = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def approx(d):
    return {k: pytest.approx(v, abs=1e-12) for k, v in d.items()}


def test_hadamard_measure():
    assert simulate(HDR + "qreg q[1];\ncreg c[1];\nh q[0];\nmeasure q[0] -> c[0];\n") == approx(
        {"0": 0.5, "1": 0.5})


def test_empty_with_measure():
    assert simulate("qreg q[1]; creg c[1]; measure q[0] -> c[0];") == approx({"0": 1.0})


def test_bit_order_and_bell():
    d = simulate("qreg q[3]; creg c[3]; x q[2]; h q[0]; cx q[0],q[1];"
                 "measure q[0] -> c[0]; measure q[1] -> c[1]; measure q[2] -> c[2];")
    assert d == approx({"001": 0.5, "111": 0.5})


def test_phase_gates():
    # H S S H = H Z H = X
    d = simulate("qreg q[1]; creg c[1]; h q[0]; s q[0]; s q[0]; h q[0]; measure q[0] -> c[0];")
    assert d == approx({"1": 1.0})
    d = simulate("qreg q[1]; creg c[1]; h q[0]; t q[0]; tdg q[0]; h q[0]; measure q[0] -> c[0];")
    assert d == approx({"0": 1.0})
    d = simulate("qreg q[1]; creg c[1]; y q[0]; sdg q[0]; measure q[0] -> c[0];")
    assert d == approx({"1": 1.0})


def test_swaps_relabel_and_measured_wire_reused():
    # q0 is measured and then has a routing pass through it
    text = ("qreg q[3]; creg c[2]; h q[0]; cx q[0],q[2]; measure q[0] -> c[0];"
            "swap q[0],q[1]; x q[1]; swap q[0],q[1]; measure q[2] -> c[1];")
    assert simulate(text) == approx({"00": 0.5, "11": 0.5})


def test_qubit_cap_counts_only_active_wires():
    ops = " ".join(f"swap q[{i}],q[{i + 1}];" for i in range(15))
    simulate(f"qreg q[16]; creg c[1]; x q[0]; {ops} measure q[15] -> c[0];")
    with pytest.raises(TooManyQubits):
        simulate("qreg q[12]; " + " ".join(f"h q[{i}];" for i in range(11)))
    simulate("qreg q[12]; " + " ".join(f"h q[{i}];" for i in range(11)), max_qubits=11)


def test_bv_source():
    d = simulate(gen_bv(4, "111"))
    assert sum(p for k, p in d.items() if k[:3] == "111") == pytest.approx(1.0, abs=1e-12)


def test_circuit_input_and_tv():
    c = Circuit.from_ops(2, [("h", 0), ("measure", 0, 0)])
    assert total_variation(simulate(c), {"0": 1.0}) == pytest.approx(0.5)
    assert total_variation({"0": 1.0}, {"0": 1.0}) == 0
