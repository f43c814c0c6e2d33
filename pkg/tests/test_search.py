from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nisq_smtc.bench import gen_bv, gen_random
from nisq_smtc.circuit import Circuit
from nisq_smtc.encoding import BackendOutcome, Solution, Status
from nisq_smtc.errors import ConfigError, EmptySchedule, TooManyQubits
from nisq_smtc.machine import MachineGrid, standard_grid
from nisq_smtc.schedule import Mapping, Schedule, makespan
from nisq_smtc.search import CompileStatus, SearchState, bisect, opt_compile
from nisq_smtc.validator import brute_force_optimal, validate


def fake_probe(threshold, timeout_at=()):
    """Sat iff t_max >= threshold; probes listed in ``timeout_at`` time out."""
    def probe(t_max, budget):
        if t_max in timeout_at:
            return BackendOutcome(Status.TIMEOUT)
        if t_max >= threshold:
            return BackendOutcome(Status.SAT, Solution(Mapping({}), Schedule(), t_max))
        return BackendOutcome(Status.UNSAT)
    return probe


def test_eta_and_convergence():
    s = SearchState(99, 109)
    assert s.eta == Fraction(109, 100) and s.converged
    assert not SearchState(99, 110).converged


@given(st.integers(1, 5000), st.integers(1, 5000))
def test_bisect_brackets_threshold(threshold, upper):
    state = bisect(fake_probe(threshold), upper)
    if threshold > upper:
        assert state.best is None and not state.poisoned
        return
    assert state.lower < threshold <= state.upper
    assert state.converged
    assert state.probes[0].t_max == upper
    for p in state.probes:
        assert (p.status is Status.SAT) == (p.t_max >= threshold)


def test_bisect_timeout_poisons():
    state = bisect(fake_probe(10, timeout_at={50}), 100)
    assert state.poisoned and state.converged
    assert state.lower >= 50 or state.upper <= 50


def test_bisect_job_budget():
    state = bisect(fake_probe(10), 100, job_timeout=0)
    assert state.best is None and state.poisoned and state.probes == []


def test_makespan_examples():
    assert makespan(Schedule({1: 1}, {1: 8})) == 8
    assert makespan(Schedule({1: 1, 2: 2}, {1: 1, 2: 8})) == 9
    assert makespan(Schedule({1: 5}, {1: 0})) == 0
    with pytest.raises(EmptySchedule):
        makespan(Schedule())


def test_single_h():
    res = opt_compile(Circuit.from_ops(1, [("h", 0)]), standard_grid(8))
    assert res.status is CompileStatus.NEAR_OPTIMAL and res.makespan == 1


def test_too_many_qubits():
    with pytest.raises(TooManyQubits):
        opt_compile(gen_random(9, 4, 0), standard_grid(8))


def test_infeasible_window():
    c = Circuit.from_ops(2, [("cx", 0, 1)] * 3)
    res = opt_compile(c, MachineGrid(2, 2, 20))
    assert res.status is CompileStatus.INFEASIBLE and res.schedule is None and not res.ok


def test_bv6_on_2x4_matches_oracle():
    c = gen_bv(6, "00111")
    res = opt_compile(c, standard_grid(8))
    assert res.status is CompileStatus.NEAR_OPTIMAL
    # every CNOT adjacent: only the hardware CNOT duration
    assert all(res.schedule.duration[g.id] == 8 for g in c.gates if g.is_cnot)
    lower, upper = res.bounds
    assert res.schedule.max_finish() > lower and res.makespan <= upper
    assert validate(c, standard_grid(8), res.mapping, res.schedule).ok


def test_deterministic():
    c = gen_random(4, 10, 11)
    m = MachineGrid(2, 3, 500)
    a, b = opt_compile(c, m, "1bp"), opt_compile(c, m, "1bp")
    assert a.schedule.to_dict() == b.schedule.to_dict() and a.mapping == b.mapping


def test_strip_virtual_restores_phase_gates():
    c = Circuit.from_ops(2, [("t", 0), ("h", 0), ("s", 1), ("cx", 0, 1), ("z", 0)])
    m = MachineGrid(2, 2, 100)
    res = opt_compile(c, m, strip_virtual=True)
    assert set(res.schedule.start) == {1, 2, 3, 4, 5}
    assert validate(c, m, res.mapping, res.schedule).ok
    slow = MachineGrid(2, 2, 100, durations=m.durations.with_overrides({"t": 1}))
    with pytest.raises(ConfigError):
        opt_compile(c, slow, strip_virtual=True)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["rr", "1bp"]))
def test_oracle_bounds(seed, pol):
    c = gen_random(2 + seed % 3, 2 + seed % 6, seed)
    m = MachineGrid(2, 3, 300)
    res = opt_compile(c, m, pol)
    opt = brute_force_optimal(c, m, pol).optimal_makespan
    lower, upper = res.bounds
    assert res.status is CompileStatus.NEAR_OPTIMAL
    assert opt <= res.makespan and 10 * res.makespan <= 11 * opt
    # the best schedule starting at slot 1 finishes at opt + 1 > lower
    assert opt + 1 > lower and res.makespan < upper
