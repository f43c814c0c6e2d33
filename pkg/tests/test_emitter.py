from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nisq_smtc.bench import gen_random
from nisq_smtc.circuit import Circuit, GateKind, parse_qasm
from nisq_smtc.emitter import emit_qasm, realize_path, route_all
from nisq_smtc.errors import DirectionUnsatisfiable, PathOutsideReservation
from nisq_smtc.heuristic import heuristic_compile
from nisq_smtc.machine import Coord, MachineGrid, standard_grid
from nisq_smtc.schedule import Mapping, Schedule
from nisq_smtc.search import opt_compile

C = Coord


def one_cnot(ctrl, targ):
    c = Circuit.from_ops(2, [("cx", 0, 1)])
    return c, Mapping({0: C(*ctrl), 1: C(*targ)})


def test_adjacent_path():
    c, mp = one_cnot((1, 1), (1, 2))
    r = realize_path(c.gate(1), mp, "rr")
    assert r.forward_swaps == () and r.hw_cnot_edge == (C(1, 1), C(1, 2)) and r.restore_swaps == ()


def test_distance_two_rectangle():
    c, mp = one_cnot((1, 1), (1, 3))
    r = realize_path(c.gate(1), mp, "rr")
    assert r.forward_swaps == ((C(1, 1), C(1, 2)),)
    assert r.hw_cnot_edge == (C(1, 2), C(1, 3))
    assert r.restore_swaps == ((C(1, 2), C(1, 1)),)


def test_one_bend_through_junction():
    c, mp = one_cnot((1, 1), (2, 3))
    r = realize_path(c.gate(1), mp, "1bp", C(1, 3))
    assert r.forward_swaps == ((C(1, 1), C(1, 2)), (C(1, 2), C(1, 3)))
    assert r.hw_cnot_edge == (C(1, 3), C(2, 3))
    assert r.restore_swaps == ((C(1, 3), C(1, 2)), (C(1, 2), C(1, 1)))
    other = realize_path(c.gate(1), mp, "1bp", C(2, 1))
    assert other.forward_swaps[0] == (C(1, 1), C(2, 1))
    with pytest.raises(PathOutsideReservation):
        realize_path(c.gate(1), mp, "1bp", C(2, 2))


def test_single_h_emitted():
    c = Circuit.from_ops(1, [("h", 0)])
    out = emit_qasm(c, Mapping({0: C(1, 1)}), Schedule({1: 1}, {1: 1}), standard_grid(8))
    assert "h q[0];" in out.qasm_text and "qreg q[8];" in out.qasm_text
    assert "// @t=1" in out.qasm_text
    bare = emit_qasm(c, Mapping({0: C(1, 1)}), Schedule({1: 1}, {1: 1}), standard_grid(8),
                     emit_timing=False)
    assert "@t" not in bare.qasm_text


def test_swap_decompose_counts():
    c, mp = one_cnot((1, 1), (1, 3))
    sched = Schedule({1: 1}, {1: 56})
    out = emit_qasm(c, mp, sched, standard_grid(8), swap_decompose="cx")
    assert out.stats["gate_counts"] == {"cx": 7}
    native = emit_qasm(c, mp, sched, standard_grid(8))
    assert native.stats["gate_counts"] == {"cx": 1, "swap": 2} and native.stats["swap_count"] == 2
    # swap at t, cx after one swap time, restore after the cx
    assert [i[0] for i in native.instructions] == [1, 25, 33]


def test_reverse_direction_conjugated():
    a, b = C(1, 1), C(1, 2)
    m = MachineGrid(1, 2, 100, directed_edges=frozenset({(b, a)}))
    c, mp = one_cnot((1, 1), (1, 2))
    out = emit_qasm(c, mp, Schedule({1: 1}, {1: 8}), m, emit_timing=False)
    body = out.qasm_text.splitlines()[3:]
    assert body == ["h q[0];", "h q[1];", "cx q[1],q[0];", "h q[0];", "h q[1];"]
    blocked = MachineGrid(1, 3, 100, directed_edges=frozenset({(C(1, 2), C(1, 3))}))
    with pytest.raises(DirectionUnsatisfiable):
        emit_qasm(c, mp, Schedule({1: 1}, {1: 8}), blocked)


def check_permutation(circuit, mapping, schedule, machine, emitted, routed):
    """Follow wires through swaps: every gate must land on its program qubits
    and each CNOT's restore must bring the layout back."""
    home = {machine.index(c): q for q, c in mapping.items()}
    at = dict(home)  # hardware index -> program qubit; spare wires are absent
    ins = iter(emitted.instructions)
    for gid in sorted(schedule.start, key=lambda g: (schedule.start[g], g)):
        g = circuit.gate(gid)
        block = 1 + (len(routed[gid].forward_swaps) * 2 if g.is_cnot else 0)
        seen = []
        for _ in range(block):
            _, name, idx, cbit = next(ins)
            if name == "swap":
                a, b = idx
                qa, qb = at.pop(a, None), at.pop(b, None)
                if qb is not None:
                    at[a] = qb
                if qa is not None:
                    at[b] = qa
            else:
                seen.append((name, tuple(at.get(i) for i in idx), cbit))
        assert seen == [(g.kind.value, g.operands, g.cbit)]
        assert at == home
    assert next(ins, None) is None


def compiled_cases():
    return st.tuples(st.integers(0, 10_000), st.sampled_from(["rr", "1bp"]))


@settings(max_examples=40, deadline=None)
@given(compiled_cases())
def test_permutation_soundness(case):
    seed, pol = case
    c = gen_random(2 + seed % 7, 1 + seed % 30, seed, measure_all=True)
    m = standard_grid(8)
    res = heuristic_compile(c, m, pol)
    routed = route_all(c, res.mapping, res.schedule, pol)
    out = emit_qasm(c, res.mapping, res.schedule, m, pol, routed=routed)
    check_permutation(c, res.mapping, res.schedule, m, out, routed)


@settings(max_examples=10, deadline=None)
@given(compiled_cases())
def test_roundtrip_gate_multiset(case):
    seed, pol = case
    c = gen_random(2 + seed % 4, 1 + seed % 8, seed, measure_all=True)
    m = MachineGrid(2, 3, 800)
    res = opt_compile(c, m, pol)
    routed = route_all(c, res.mapping, res.schedule, pol)
    out = emit_qasm(c, res.mapping, res.schedule, m, pol, routed=routed)
    back = parse_qasm(out.qasm_text, compiled=True)
    got = Counter(g.kind for g in back.gates)
    want = Counter(g.kind for g in c.gates)
    want[GateKind.SWAP] = sum(len(r.forward_swaps) + len(r.restore_swaps) for r in routed.values())
    assert got == +want
    measured = {g.operands[0]: g.cbit for g in back.gates if g.kind is GateKind.MEASURE}
    assert measured == {m.index(res.mapping[g.operands[0]]): g.cbit
                        for g in c.gates if g.kind is GateKind.MEASURE}
