"""Near-optimal makespan search: bisection over the completion bound with
a fresh satisfiability check per probe."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable

from .circuit import Circuit, strip_virtual as _strip, transitive_closure
from .encoding import BackendOutcome, RoutingPolicy, Solution, Status, check, encode
from .errors import ConfigError, TooManyQubits
from .machine import MachineGrid
from .schedule import Mapping, Schedule, makespan, restore_virtual

log = logging.getLogger(__name__)

DEFAULT_EPSILON = Fraction(1, 10)
DEFAULT_PROBE_TIMEOUT = 300.0
DEFAULT_JOB_TIMEOUT = 24 * 3600.0


class CompileStatus(Enum):
    NEAR_OPTIMAL = "near-optimal"
    BEST_EFFORT = "best-effort"
    INFEASIBLE = "infeasible"
    GREEDY = "greedy"
    REFINED = "refined"
    NO_FEASIBLE_SOLUTION = "no-feasible-solution"


@dataclass
class ProbeRecord:
    t_max: int
    status: Status
    elapsed: float


@dataclass
class SearchState:
    """Bounds with ``upper`` known satisfiable and ``lower`` known (or
    assumed, after a timeout) unsatisfiable."""

    lower: int
    upper: int
    epsilon: Fraction = DEFAULT_EPSILON
    best: Solution | None = None
    probes: list[ProbeRecord] = field(default_factory=list)
    poisoned: bool = False

    @property
    def eta(self) -> Fraction:
        return Fraction(self.upper, self.lower + 1)

    @property
    def converged(self) -> bool:
        return self.eta < 1 + self.epsilon


@dataclass
class CompileResult:
    status: CompileStatus
    mapping: Mapping | None
    schedule: Schedule | None
    makespan: int | None
    bounds: tuple[int, int] | None = None
    eta: Fraction | None = None
    dummy_start: int | None = None
    probes: list[ProbeRecord] = field(default_factory=list)
    algorithm: str = "opt"
    policy: RoutingPolicy = RoutingPolicy.RECTANGLE
    compile_time: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.schedule is not None and self.status not in (
            CompileStatus.INFEASIBLE, CompileStatus.NO_FEASIBLE_SOLUTION)


Probe = Callable[[int, float], BackendOutcome]


def bisect(probe: Probe, upper: int, epsilon: Fraction = DEFAULT_EPSILON, *,
           probe_timeout: float = DEFAULT_PROBE_TIMEOUT,
           job_timeout: float = DEFAULT_JOB_TIMEOUT) -> SearchState:
    """Shrink ``(lower, upper]`` until ``upper / (lower + 1) < 1 + epsilon``.

    The first probe is at ``upper`` itself; if it is unsatisfiable the
    state comes back with ``best is None``.
    """
    began = time.monotonic()
    state = SearchState(0, upper, Fraction(epsilon))

    def run(t_max: int) -> BackendOutcome | None:
        budget = min(probe_timeout, job_timeout - (time.monotonic() - began))
        if budget <= 0:
            return None
        out = probe(t_max, budget)
        state.probes.append(ProbeRecord(t_max, out.status, out.elapsed))
        log.debug("probe t_max=%d -> %s (%.3fs)", t_max, out.status.value, out.elapsed)
        return out

    out = run(upper)
    if out is None or out.status is not Status.SAT:
        state.poisoned = out is None or out.status is Status.TIMEOUT
        return state
    state.best = out.solution

    while not state.converged:
        mid = (state.lower + state.upper) // 2
        out = run(mid)
        if out is None:
            state.poisoned = True
            break
        if out.status is Status.SAT:
            state.upper, state.best = mid, out.solution
        else:
            state.lower = mid
            if out.status is Status.TIMEOUT:
                state.poisoned = True
        assert state.lower < state.upper, "bisection invariant broken"
    return state


def opt_compile(circuit: Circuit, machine: MachineGrid, policy=RoutingPolicy.RECTANGLE,
                epsilon: Fraction = DEFAULT_EPSILON, *,
                probe_timeout: float = DEFAULT_PROBE_TIMEOUT,
                job_timeout: float = DEFAULT_JOB_TIMEOUT,
                strip_virtual: bool = False,
                mapping: Mapping | None = None,
                upper: int | None = None) -> CompileResult:
    """Jointly map, schedule and route ``circuit`` to within ``1 + epsilon``
    of the optimal completion time.

    ``mapping`` pins qubit positions (used by the heuristic's minimize
    mode); ``upper`` overrides the starting bound, default the coherence
    window.
    """
    policy = RoutingPolicy.parse(policy)
    if circuit.num_qubits > machine.size:
        raise TooManyQubits(f"{circuit.num_qubits} qubits on a {machine.rows}x{machine.cols} grid")
    began = time.perf_counter()
    work, strip = _prepare(circuit, machine, strip_virtual)
    info = transitive_closure(work)

    def probe(t_max: int, budget: float) -> BackendOutcome:
        return check(encode(work, machine, policy, t_max, mapping=mapping, info=info), budget)

    state = bisect(probe, upper or machine.coherence, Fraction(epsilon),
                   probe_timeout=probe_timeout, job_timeout=job_timeout)
    elapsed = time.perf_counter() - began
    base = dict(probes=state.probes, algorithm="opt", policy=policy, compile_time=elapsed,
                details={"routing_pairs": len(info.cnot_pairs)})
    if state.best is None:
        status = CompileStatus.BEST_EFFORT if state.poisoned else CompileStatus.INFEASIBLE
        return CompileResult(status, None, None, None, (state.lower, state.upper), None, **base)

    sched = state.best.schedule
    if strip is not None:
        sched = restore_virtual(strip, sched)
    status = CompileStatus.NEAR_OPTIMAL
    if state.poisoned or not state.converged:
        status = CompileStatus.BEST_EFFORT
    return CompileResult(status, state.best.mapping, sched,
                         makespan(sched) if len(sched) else 0,
                         (state.lower, state.upper), state.eta, state.best.dummy_start, **base)


def _prepare(circuit: Circuit, machine: MachineGrid, strip_virtual: bool):
    if not strip_virtual:
        return circuit, None
    if any(g.kind.is_virtual and machine.duration(g.kind) for g in circuit.gates):
        raise ConfigError("virtual-gate stripping needs zero durations for z, s, sdg, t, tdg")
    strip = _strip(circuit)
    return strip.reduced, strip
