"""Independent legality checks for compiled schedules, and an exhaustive
optimal-makespan oracle for tiny instances.

Nothing here reuses the solver encoding or the closure kernel, so the
two sides can be checked against each other.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .circuit import Circuit, GateKind
from .encoding import RoutingPolicy
from .errors import InstanceTooLarge, TooManyQubits
from .machine import Coord, MachineGrid
from .schedule import Mapping, Schedule

ORACLE_MAX_CELLS = 6
ORACLE_MAX_GATES = 8


@dataclass(frozen=True)
class Violation:
    kind: str
    gates: tuple[int, ...]
    detail: str = ""


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    makespan: int = 0
    fits_coherence: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def _dist(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def _box(a, b):
    return (min(a[0], b[0]), min(a[1], b[1]), max(a[0], b[0]), max(a[1], b[1]))


def _boxes_touch(r, s) -> bool:
    return r[0] <= s[2] and s[0] <= r[2] and r[1] <= s[3] and s[1] <= r[3]


def _concurrent_in_time(ti, di, tj, dj) -> bool:
    # closed intervals: sharing an endpoint counts
    return ti <= tj + dj and tj <= ti + di


def _reachability(circuit: Circuit) -> dict[int, set[int]]:
    """Descendants by depth-first search; works for any edge order."""
    succ = circuit.successors()
    out = {}
    for g in circuit.gates:
        seen, stack = set(), list(succ[g.id])
        while stack:
            v = stack.pop()
            if v not in seen:
                seen.add(v)
                stack.extend(succ[v])
        out[g.id] = seen
    return out


def concurrent_cnot_pairs(circuit: Circuit) -> list[tuple[int, int]]:
    reach = _reachability(circuit)
    cnots = [g.id for g in circuit.gates if g.kind is GateKind.CNOT]
    return [(a, b) for k, a in enumerate(cnots) for b in cnots[k + 1:]
            if b not in reach[a] and a not in reach[b]]


def _expected_duration(circuit: Circuit, machine: MachineGrid, mapping: Mapping, gid: int):
    g = circuit.gate(gid)
    tau = machine.durations
    if g.kind is GateKind.CNOT:
        dist = _dist(mapping[g.control], mapping[g.target])
        if dist == 0:
            return None
        return 2 * (dist - 1) * tau.swap + tau.cnot
    return tau.of(g.kind)


def _regions(circuit, mapping, schedule, policy, gid, report):
    g = circuit.gate(gid)
    c, t = mapping[g.control], mapping[g.target]
    if policy is RoutingPolicy.RECTANGLE:
        return [_box(c, t)]
    b = schedule.bend.get(gid)
    if b is None or tuple(b) not in ((c[0], t[1]), (t[0], c[1])):
        report.violations.append(Violation("InvalidBend", (gid,), f"junction {b} for {c}->{t}"))
        b = (c[0], t[1])
    return [_box(c, b), _box(b, t)]


def validate(circuit: Circuit, machine: MachineGrid, mapping: Mapping, schedule: Schedule,
             policy=RoutingPolicy.RECTANGLE, routed=None) -> ValidationReport:
    policy = RoutingPolicy.parse(policy)
    rep = ValidationReport()
    bad = rep.violations.append

    # mapping
    mapped_ok = True
    for q in range(circuit.num_qubits):
        if q not in mapping.coords:
            bad(Violation("OutOfBounds", (), f"program qubit {q} is unmapped"))
            mapped_ok = False
        elif not (1 <= mapping[q][0] <= machine.rows and 1 <= mapping[q][1] <= machine.cols):
            bad(Violation("OutOfBounds", (), f"qubit {q} at {mapping[q]} is off the grid"))
    seen: dict[tuple, int] = {}
    for q, c in sorted(mapping.coords.items()):
        if tuple(c) in seen:
            bad(Violation("MappingCollision", (), f"qubits {seen[tuple(c)]} and {q} share {c}"))
        seen[tuple(c)] = q

    # schedule coverage, window, durations
    ids = [g.id for g in circuit.gates]
    missing = [gid for gid in ids if gid not in schedule.start or gid not in schedule.duration]
    for gid in missing:
        bad(Violation("MissingGate", (gid,), "gate has no start time"))
    present = [gid for gid in ids if gid not in missing]
    for gid in present:
        t, d = schedule.start[gid], schedule.duration[gid]
        if t < 1 or t + d > machine.coherence:
            bad(Violation("CoherenceViolation", (gid,), f"[{t}, {t + d}] outside [1, {machine.coherence}]"))
        if mapped_ok:
            want = _expected_duration(circuit, machine, mapping, gid)
            if want is None:
                bad(Violation("MappingCollision", (gid,), "CNOT operands on one hardware qubit"))
            elif d != want:
                bad(Violation("DurationMismatch", (gid,), f"duration {d}, expected {want}"))

    # dependencies
    for i, j in sorted(circuit.deps):
        if i in schedule.start and j in schedule.start and i in schedule.duration:
            if schedule.start[j] < schedule.start[i] + schedule.duration[i]:
                bad(Violation("DependencyViolation", (i, j),
                              f"t[{j}]={schedule.start[j]} < t[{i}]+d[{i}]="
                              f"{schedule.start[i] + schedule.duration[i]}"))

    # per-qubit exclusivity, half-open intervals of positive length
    by_qubit: dict[int, list[int]] = {}
    for gid in present:
        for q in circuit.gate(gid).operands:
            by_qubit.setdefault(q, []).append(gid)
    for q, gids in by_qubit.items():
        for a, b in itertools.combinations(gids, 2):
            ta, da = schedule.start[a], schedule.duration[a]
            tb, db = schedule.start[b], schedule.duration[b]
            if da > 0 and db > 0 and ta < tb + db and tb < ta + da:
                bad(Violation("QubitDoubleBooked", (a, b), f"program qubit {q}"))

    # routing between CNOTs that dependencies do not order
    if mapped_ok and not rep.kinds() & {"MappingCollision", "OutOfBounds"}:
        regions = {}
        for gid in present:
            if circuit.gate(gid).kind is GateKind.CNOT:
                regions[gid] = _regions(circuit, mapping, schedule, policy, gid, rep)
        for a, b in concurrent_cnot_pairs(circuit):
            if a not in regions or b not in regions:
                continue
            if not _concurrent_in_time(schedule.start[a], schedule.duration[a],
                                       schedule.start[b], schedule.duration[b]):
                continue
            if any(_boxes_touch(r, s) for r in regions[a] for s in regions[b]):
                bad(Violation("RoutingOverlap", (a, b), "reserved regions intersect while concurrent"))
        if routed is not None:
            for gid, r in routed.items():
                _check_route(circuit, mapping, regions.get(gid), r, rep)

    if present:
        starts = [schedule.start[g] for g in present]
        fins = [schedule.start[g] + schedule.duration[g] for g in present]
        rep.makespan = max(fins) - min(starts)
        rep.fits_coherence = max(fins) <= machine.coherence and min(starts) >= 1
    return rep


def _check_route(circuit, mapping, region, r, rep):
    g = circuit.gate(r.gate_id)
    c, t = tuple(mapping[g.control]), tuple(mapping[g.target])
    fwd = [tuple(map(tuple, e)) for e in r.forward_swaps]
    problems = []
    if len(fwd) != _dist(c, t) - 1:
        problems.append("wrong number of swaps")
    pos = c
    for a, b in fwd:
        if a != pos or _dist(a, b) != 1:
            problems.append(f"swap {a}-{b} does not continue the path")
        pos = b
    e0, e1 = (tuple(x) for x in r.hw_cnot_edge)
    if e0 != pos or e1 != t or _dist(e0, e1) != 1:
        problems.append("hardware CNOT does not join moved control and target")
    if [tuple(map(tuple, e)) for e in r.restore_swaps] != [(b, a) for a, b in reversed(fwd)]:
        problems.append("restore sequence is not the reversed forward sequence")
    if region is not None:
        cells = {c} | {b for _, b in fwd} | {t}
        for cell in cells:
            if not any(x[0] <= cell[0] <= x[2] and x[1] <= cell[1] <= x[3] for x in region):
                problems.append(f"{cell} outside reservation")
    for p in problems:
        rep.violations.append(Violation("RouteMismatch", (r.gate_id,), p))


# --- exhaustive oracle ------------------------------------------------------

@dataclass
class OracleResult:
    optimal_makespan: int
    witness: tuple[Mapping, Schedule]
    explored: int


def _longest(n_ids, dur, arcs):
    """Earliest 0-based starts under weighted arcs, or None on a cycle."""
    indeg = {v: 0 for v in n_ids}
    out: dict[int, list[tuple[int, int]]] = {v: [] for v in n_ids}
    for a, b, w in arcs:
        out[a].append((b, w))
        indeg[b] += 1
    est = {v: 0 for v in n_ids}
    stack = [v for v in n_ids if indeg[v] == 0]
    done = 0
    while stack:
        v = stack.pop()
        done += 1
        for b, w in out[v]:
            if est[v] + w > est[b]:
                est[b] = est[v] + w
            indeg[b] -= 1
            if indeg[b] == 0:
                stack.append(b)
    if done != len(n_ids):
        return None
    return est


def brute_force_optimal(circuit: Circuit, machine: MachineGrid,
                        policy=RoutingPolicy.RECTANGLE) -> OracleResult:
    """Minimum makespan over every injective placement.

    For each placement (and each junction choice under one-bend routing)
    the pairs of concurrent CNOTs whose reservations meet must be
    separated in time; every before/after orientation of those pairs is
    searched depth-first, and each complete orientation is scheduled at
    earliest starts.
    """
    policy = RoutingPolicy.parse(policy)
    if machine.size > ORACLE_MAX_CELLS or len(circuit) > ORACLE_MAX_GATES:
        raise InstanceTooLarge(f"oracle caps: <= {ORACLE_MAX_CELLS} cells, <= {ORACLE_MAX_GATES} gates")
    if circuit.num_qubits > machine.size:
        raise TooManyQubits("more program qubits than grid cells")
    ids = [g.id for g in circuit.gates]
    tau = machine.durations
    dep_arcs = sorted(circuit.deps)
    pairs = concurrent_cnot_pairs(circuit)
    in_pairs = sorted({g for p in pairs for g in p})
    cells = [Coord(x, y) for x in range(1, machine.rows + 1) for y in range(1, machine.cols + 1)]

    if not ids:
        return OracleResult(0, (Mapping(dict(enumerate(cells))), Schedule()), 1)
    best = [None, None, None]  # makespan, mapping, schedule
    explored = 0

    for placement in itertools.permutations(cells, circuit.num_qubits):
        explored += 1
        pos = dict(enumerate(placement))
        dur = {}
        for g in circuit.gates:
            if g.kind is GateKind.CNOT:
                dur[g.id] = 2 * (_dist(pos[g.control], pos[g.target]) - 1) * tau.swap + tau.cnot
            else:
                dur[g.id] = tau.of(g.kind)
        base = [(i, j, dur[i]) for i, j in dep_arcs]
        est = _longest(ids, dur, base)
        lower = max(est[v] + dur[v] for v in ids)
        if best[0] is not None and lower >= best[0]:
            continue

        if policy is RoutingPolicy.RECTANGLE:
            bend_sets = [{}]
        else:
            choices = []
            for gid in in_pairs:
                g = circuit.gate(gid)
                c, t = pos[g.control], pos[g.target]
                opts = list(dict.fromkeys([Coord(c.x, t.y), Coord(t.x, c.y)]))
                choices.append([(gid, b) for b in opts])
            bend_sets = [dict(combo) for combo in itertools.product(*choices)]

        for bends in bend_sets:
            regions = {}
            for gid in in_pairs:
                g = circuit.gate(gid)
                c, t = pos[g.control], pos[g.target]
                if policy is RoutingPolicy.RECTANGLE:
                    regions[gid] = [_box(c, t)]
                else:
                    regions[gid] = [_box(c, bends[gid]), _box(bends[gid], t)]
            conflicts = [(a, b) for a, b in pairs
                         if any(_boxes_touch(r, s) for r in regions[a] for s in regions[b])]
            found = _orient(ids, dur, base, conflicts, best[0])
            if found is not None and (best[0] is None or found[0] < best[0]):
                sched = Schedule({v: found[1][v] + 1 for v in ids}, dict(dur))
                if policy is RoutingPolicy.ONE_BEND:
                    for g in circuit.gates:
                        if g.kind is GateKind.CNOT:
                            c, t = pos[g.control], pos[g.target]
                            sched.bend[g.id] = bends.get(g.id, Coord(c.x, t.y))
                best = [found[0], Mapping(dict(pos)), sched]

    if best[0] is None:
        raise RuntimeError("oracle found no schedule")  # unreachable: orientations always exist
    return OracleResult(best[0], (best[1], best[2]), explored)


def _orient(ids, dur, base, conflicts, bound):
    """Depth-first search over separations; returns (makespan, starts)."""
    best = [bound, None]

    def span(est):
        return max(est[v] + dur[v] for v in ids)

    def dfs(k, arcs):
        est = _longest(ids, dur, arcs)
        if est is None:
            return
        m = span(est)
        if best[0] is not None and m >= best[0]:
            return
        if k == len(conflicts):
            best[0], best[1] = m, est
            return
        a, b = conflicts[k]
        # gap of one slot: the later gate must start strictly after the other ends
        dfs(k + 1, arcs + [(a, b, dur[a] + 1)])
        dfs(k + 1, arcs + [(b, a, dur[b] + 1)])

    dfs(0, list(base))
    if best[1] is None:
        return None
    return best[0], best[1]
