"""Two-phase heuristic: greedy weighted placement, earliest-ready list
scheduling with routing reservations, and solver refinement over the
fixed placement when the list schedule overshoots the coherence window."""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .circuit import Circuit, ConcurrencyInfo, transitive_closure
from .encoding import RoutingPolicy, Status, check, encode
from .errors import TooManyQubits
from .machine import Coord, MachineGrid, cnot_duration, l1_distance
from .schedule import Mapping, Schedule, makespan, restore_virtual
from .search import (DEFAULT_EPSILON, DEFAULT_PROBE_TIMEOUT, CompileResult, CompileStatus,
                     ProbeRecord, _prepare, opt_compile)

MINIMIZE_BOUND = 100_000


@dataclass(frozen=True)
class InteractionWeights:
    pair: np.ndarray   # pair[i, j]: CNOTs between qubits i and j
    total: np.ndarray  # total[i]: CNOTs qubit i takes part in

    @classmethod
    def of(cls, circuit: Circuit) -> "InteractionWeights":
        w = np.zeros((circuit.num_qubits, circuit.num_qubits), dtype=np.int64)
        for g in circuit.gates:
            if g.is_cnot:
                w[g.control, g.target] += 1
                w[g.target, g.control] += 1
        return cls(w, w.sum(axis=1))


def placement_cost(weights: InteractionWeights, mapping: Mapping) -> int:
    """Sum over unordered qubit pairs of weight times grid distance."""
    total = 0
    qs = sorted(mapping.coords)
    for a_pos, a in enumerate(qs):
        for b in qs[a_pos + 1:]:
            total += int(weights.pair[a, b]) * l1_distance(mapping[a], mapping[b])
    return total


def greedy_map(circuit: Circuit, machine: MachineGrid) -> Mapping:
    Q = circuit.num_qubits
    if Q > machine.size:
        raise TooManyQubits(f"{Q} qubits on a {machine.rows}x{machine.cols} grid")
    weights = InteractionWeights.of(circuit)
    order = sorted(range(Q), key=lambda q: (-int(weights.total[q]), q))
    free = list(machine.coords())  # kept in lexicographic order
    placed: dict[int, Coord] = {}
    for q in order:
        if not placed:
            cells = list(machine.coords())
            best = min(free, key=lambda c: (max(l1_distance(c, o) for o in cells), c))
        else:
            partners = [(int(weights.pair[q, p]), c) for p, c in placed.items() if weights.pair[q, p]]
            best = min(free, key=lambda h: (sum(w * l1_distance(h, c) for w, c in partners), h))
        placed[q] = best
        free.remove(best)
    return Mapping(placed)


def gate_durations(circuit: Circuit, machine: MachineGrid, mapping: Mapping) -> dict[int, int]:
    out = {}
    for g in circuit.gates:
        if g.is_cnot:
            out[g.id] = cnot_duration(l1_distance(mapping[g.control], mapping[g.target]),
                                      machine.durations)
        else:
            out[g.id] = machine.duration(g.kind)
    return out


def _rect(a, b):
    return (min(a[0], b[0]), min(a[1], b[1]), max(a[0], b[0]), max(a[1], b[1]))


def _rects_meet(r, s) -> bool:
    return not (r[0] > s[2] or r[2] < s[0] or r[1] > s[3] or r[3] < s[1])


def _regions_meet(ra, rb) -> bool:
    return any(_rects_meet(a, b) for a in ra for b in rb)


def bend_options(ctrl: Coord, targ: Coord) -> list[Coord]:
    """One-bend junctions, the (ctrl row, targ column) corner first."""
    first, second = Coord(ctrl.x, targ.y), Coord(targ.x, ctrl.y)
    return [first] if first == second else [first, second]


def route_region(policy: RoutingPolicy, ctrl: Coord, targ: Coord, bend: Coord | None = None):
    if policy is RoutingPolicy.RECTANGLE:
        return [_rect(ctrl, targ)]
    return [_rect(ctrl, bend), _rect(bend, targ)]


def greedy_schedule(circuit: Circuit, machine: MachineGrid, mapping: Mapping, policy,
                    info: ConcurrencyInfo | None = None) -> Schedule:
    """List-schedule gates earliest-ready first (lower id on ties), each at
    the first time that clears dependencies and routing reservations."""
    policy = RoutingPolicy.parse(policy)
    info = info or transitive_closure(circuit)
    dur = gate_durations(circuit, machine, mapping)
    partners: dict[int, set[int]] = {}
    for a, b in info.cnot_pairs:
        partners.setdefault(a, set()).add(b)
        partners.setdefault(b, set()).add(a)

    preds = circuit.predecessors()
    succs = circuit.successors()
    waiting = {gid: len(p) for gid, p in preds.items()}
    ready_at = {gid: 1 for gid in waiting}
    heap = [(1, gid) for gid, n in waiting.items() if n == 0]
    heapq.heapify(heap)
    sched = Schedule()
    regions: dict[int, list] = {}

    while heap:
        ready, gid = heapq.heappop(heap)
        g = circuit.gate(gid)
        start = ready
        if g.is_cnot:
            ctrl, targ = mapping[g.control], mapping[g.target]
            placed = [k for k in partners.get(gid, ()) if k in regions]
            options = bend_options(ctrl, targ) if policy is RoutingPolicy.ONE_BEND else [None]
            best = None
            for bend in options:
                region = route_region(policy, ctrl, targ, bend)
                hits = [k for k in placed if _regions_meet(region, regions[k])]
                t = kernels.earliest_start(
                    ready, dur[gid],
                    np.fromiter((sched.start[k] for k in hits), np.int64, len(hits)),
                    np.fromiter((dur[k] for k in hits), np.int64, len(hits)))
                if best is None or t < best[0]:
                    best = (t, bend, region)
            start, bend, regions[gid] = best
            if bend is not None:
                sched.bend[gid] = bend
        sched.start[gid] = start
        sched.duration[gid] = dur[gid]
        fin = start + dur[gid]
        for s in succs[gid]:
            ready_at[s] = max(ready_at[s], fin)
            waiting[s] -= 1
            if waiting[s] == 0:
                heapq.heappush(heap, (ready_at[s], s))
    return sched


def critical_path(circuit: Circuit, durations: dict[int, int]) -> int:
    """Longest duration-weighted dependency chain."""
    longest: dict[int, int] = {}
    preds = circuit.predecessors()
    for g in circuit.gates:  # ids are a topological order
        longest[g.id] = durations[g.id] + max((longest[p] for p in preds[g.id]), default=0)
    return max(longest.values(), default=0)


def heuristic_compile(circuit: Circuit, machine: MachineGrid, policy=RoutingPolicy.RECTANGLE, *,
                      refine: str = "fit", probe_timeout: float = DEFAULT_PROBE_TIMEOUT,
                      epsilon: Fraction = DEFAULT_EPSILON, strip_virtual: bool = False,
                      minimize_bound: int = MINIMIZE_BOUND) -> CompileResult:
    """Greedy placement and scheduling, with solver refinement.

    ``refine="fit"`` calls the solver only when the greedy schedule
    finishes after the coherence window, asking for any schedule that
    fits. ``refine="minimize"`` always runs the bisection search over the
    fixed placement with ``minimize_bound`` as the window.
    """
    policy = RoutingPolicy.parse(policy)
    if refine not in ("fit", "minimize"):
        raise ValueError(f"refine must be 'fit' or 'minimize', not {refine!r}")
    began = time.perf_counter()
    work, strip = _prepare(circuit, machine, strip_virtual)
    mapping = greedy_map(work, machine)
    info = transitive_closure(work)
    greedy = greedy_schedule(work, machine, mapping, policy, info)
    greedy_finish = greedy.max_finish()
    details = {
        "greedy_makespan": makespan(greedy) if len(greedy) else 0,
        "greedy_finish": greedy_finish,
        "critical_path": critical_path(work, gate_durations(work, machine, mapping)),
        "routing_pairs": len(info.cnot_pairs),
        "refinement": "none",
    }
    timings = {"greedy": time.perf_counter() - began}

    def finish(status, sched, probes=(), bounds=None, eta=None):
        if strip is not None and sched is not None:
            sched = restore_virtual(strip, sched)
        details["timings"] = timings
        return CompileResult(status, mapping, sched,
                             (makespan(sched) if sched is not None and len(sched) else 0),
                             bounds, eta, None, list(probes), "heur", policy,
                             time.perf_counter() - began, details)

    if refine == "minimize":
        t0 = time.perf_counter()
        res = opt_compile(work, machine.with_coherence(minimize_bound), policy, epsilon,
                          probe_timeout=probe_timeout, mapping=mapping, upper=minimize_bound)
        timings["refine"] = time.perf_counter() - t0
        details["refinement"] = "minimize:" + res.status.value
        if res.schedule is None:
            return finish(CompileStatus.NO_FEASIBLE_SOLUTION, greedy, res.probes, res.bounds)
        return finish(res.status, res.schedule, res.probes, res.bounds, res.eta)

    if greedy_finish <= machine.coherence:
        return finish(CompileStatus.GREEDY, greedy)

    t0 = time.perf_counter()
    handle = encode(work, machine, policy, machine.coherence, mapping=mapping, info=info)
    if hasattr(handle.solver, "set_initial_value"):
        for gid, t in greedy.start.items():
            handle.solver.set_initial_value(handle.t[gid], t)
    out = check(handle, probe_timeout)
    timings["refine"] = time.perf_counter() - t0
    probe = ProbeRecord(machine.coherence, out.status, out.elapsed)
    details["refinement"] = "fit:" + out.status.value
    if out.status is Status.SAT:
        return finish(CompileStatus.REFINED, out.solution.schedule, [probe])
    return finish(CompileStatus.NO_FEASIBLE_SOLUTION, greedy, [probe])
