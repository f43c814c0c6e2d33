"""Constraint encoding of mapping, scheduling and routing for z3.

Every probe builds a fresh z3 context, so handles never share state and
can be checked from different workers.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import z3

from .circuit import Circuit, ConcurrencyInfo, all_cnot_pairs, transitive_closure
from .errors import BackendFailure
from .machine import Coord, MachineGrid
from .schedule import Mapping, Schedule


class RoutingPolicy(Enum):
    RECTANGLE = "rr"
    ONE_BEND = "1bp"

    @classmethod
    def parse(cls, value) -> "RoutingPolicy":
        if isinstance(value, cls):
            return value
        key = str(value).lower()
        aliases = {"rectangle": "rr", "rectanglereservation": "rr",
                   "onebend": "1bp", "onebendpaths": "1bp", "1-bend": "1bp"}
        return cls(aliases.get(key, key))


class Status(Enum):
    SAT = "sat"
    UNSAT = "unsat"
    TIMEOUT = "timeout"


@dataclass
class Solution:
    mapping: Mapping
    schedule: Schedule
    dummy_start: int


@dataclass
class BackendOutcome:
    status: Status
    solution: Solution | None = None
    elapsed: float = 0.0

    @property
    def model(self) -> Solution | None:
        return self.solution


@dataclass
class ProblemHandle:
    circuit: Circuit
    machine: MachineGrid
    policy: RoutingPolicy
    t_max: int
    ctx: z3.Context = field(repr=False)
    solver: z3.Solver = field(repr=False)
    qx: dict = field(repr=False)
    qy: dict = field(repr=False)
    t: dict = field(repr=False)
    d: dict = field(repr=False)
    bends: dict = field(repr=False)
    dummy: object = field(repr=False)
    routing_pairs: tuple[tuple[int, int], ...] = ()
    fixed_mapping: Mapping | None = None

    @property
    def routing_assertions(self) -> int:
        return len(self.routing_pairs)

    def to_smt2(self) -> str:
        return self.solver.to_smt2()


# --- formula helpers; accept z3 terms or plain ints ------------------------

def _is_const(*xs) -> bool:
    return all(isinstance(x, int) for x in xs)


def _abs(e):
    if isinstance(e, int):
        return abs(e)
    return z3.If(e >= 0, e, -e)


def _min(a, b):
    if _is_const(a, b):
        return min(a, b)
    return z3.If(a <= b, a, b)


def _max(a, b):
    if _is_const(a, b):
        return max(a, b)
    return z3.If(a >= b, a, b)


def _bool(v, ctx):
    return z3.BoolVal(v, ctx) if isinstance(v, bool) else v


def overlap_in_time(ti, di, tj, dj, ctx=None):
    """True unless one gate starts strictly after the other finishes.

    Back-to-back gates (``tj == ti + di``) count as overlapping.
    """
    return z3.Not(z3.Or(_bool(ti > tj + dj, ctx), _bool(tj > ti + di, ctx)))


def rect_overlap(ri, rj, ctx=None):
    """Closed axis-aligned intersection of ``(lx, ly, rx, ry)`` rectangles."""
    lxi, lyi, rxi, ryi = ri
    lxj, lyj, rxj, ryj = rj
    return z3.Not(z3.Or(_bool(lxi > rxj, ctx), _bool(rxi < lxj, ctx),
                        _bool(lyi > ryj, ctx), _bool(ryi < lyj, ctx)))


def _rect(a, b):
    return (_min(a[0], b[0]), _min(a[1], b[1]), _max(a[0], b[0]), _max(a[1], b[1]))


def path_overlap(segs_i, segs_j, ctx=None):
    """Any of the four segment-pair intersections of two one-bend paths."""
    return z3.Or([rect_overlap(a, b, ctx) for a in segs_i for b in segs_j])


# --- encoder ---------------------------------------------------------------

def encode(circuit: Circuit, machine: MachineGrid, policy, t_max: int, *,
           mapping: Mapping | None = None, info: ConcurrencyInfo | None = None,
           prune: bool = True) -> ProblemHandle:
    """Assert all constraints for ``t[G+1] <= t_max``.

    With ``mapping`` given, qubit positions are constants and the
    mapping constraints are left out.
    """
    policy = RoutingPolicy.parse(policy)
    Q, G = circuit.num_qubits, len(circuit)
    if t_max > machine.coherence:
        raise ValueError(f"t_max={t_max} exceeds coherence window {machine.coherence}")
    M, N, T = machine.rows, machine.cols, machine.coherence
    tau = machine.durations
    ctx = z3.Context()
    s = z3.SolverFor("QF_LIA", ctx=ctx)

    def Int(name):
        return z3.Int(name, ctx)

    qx, qy = {}, {}
    if mapping is None:
        for i in range(Q):
            qx[i], qy[i] = Int(f"qx_{i}"), Int(f"qy_{i}")
            s.add(qx[i] >= 1, qx[i] <= M, qy[i] >= 1, qy[i] <= N)
        for i in range(Q):
            for j in range(i + 1, Q):
                s.add(z3.Or(qx[i] != qx[j], qy[i] != qy[j]))
    else:
        for i in range(Q):
            qx[i], qy[i] = int(mapping[i][0]), int(mapping[i][1])

    t, d = {}, {}
    d_cnot_max = 2 * (M + N - 3) * tau.swap + tau.cnot if M + N > 2 else tau.cnot
    for g in circuit.gates:
        j = g.id
        t[j], d[j] = Int(f"t_{j}"), Int(f"d_{j}")
        s.add(t[j] >= 1, t[j] <= T, t[j] + d[j] <= t_max)
        if g.is_cnot:
            c, k = g.control, g.target
            dist = _abs(qx[c] - qx[k]) + _abs(qy[c] - qy[k])
            s.add(d[j] >= tau.cnot, d[j] <= d_cnot_max)
            s.add(d[j] == 2 * (dist - 1) * tau.swap + tau.cnot)
        else:
            s.add(d[j] == tau.of(g.kind))

    for i, j in sorted(circuit.deps):
        s.add(t[j] >= t[i] + d[i])

    dummy = Int(f"t_{G + 1}")
    s.add(dummy >= 1, dummy <= t_max)
    for g in circuit.gates:
        s.add(dummy >= t[g.id] + d[g.id])

    if prune:
        info = info or transitive_closure(circuit)
        pairs = sorted(info.cnot_pairs)
        for a, b in pairs:
            shared = set(circuit.gate(a).operands) & set(circuit.gate(b).operands)
            assert not shared, f"CNOTs {a} and {b} share a qubit but were not ordered"
    else:
        pairs = sorted(all_cnot_pairs(circuit))

    regions, bends = {}, {}
    involved = sorted({g for p in pairs for g in p})
    for j in involved:
        g = circuit.gate(j)
        ctrl = (qx[g.control], qy[g.control])
        targ = (qx[g.target], qy[g.target])
        if policy is RoutingPolicy.RECTANGLE:
            corners = _rect(ctrl, targ)
            if _is_const(*corners):
                regions[j] = [corners]
                continue
            lx, ly, rx, ry = (Int(f"{n}_{j}") for n in ("lx", "ly", "rx", "ry"))
            s.add(lx >= 1, lx <= M, rx >= 1, rx <= M, ly >= 1, ly <= N, ry >= 1, ry <= N)
            s.add(lx == corners[0], ly == corners[1], rx == corners[2], ry == corners[3])
            regions[j] = [(lx, ly, rx, ry)]
        else:
            bx, by = Int(f"bx_{j}"), Int(f"by_{j}")
            s.add(bx >= 1, bx <= M, by >= 1, by <= N)
            s.add(z3.Or(z3.And(bx == ctrl[0], by == targ[1]),
                        z3.And(bx == targ[0], by == ctrl[1])))
            bends[j] = (bx, by)
            regions[j] = [_rect(ctrl, (bx, by)), _rect((bx, by), targ)]

    for a, b in pairs:
        in_time = overlap_in_time(t[a], d[a], t[b], d[b], ctx)
        if policy is RoutingPolicy.RECTANGLE:
            in_space = rect_overlap(regions[a][0], regions[b][0], ctx)
        else:
            in_space = path_overlap(regions[a], regions[b], ctx)
        s.add(z3.Implies(in_time, z3.Not(in_space)))

    return ProblemHandle(circuit, machine, policy, t_max, ctx, s, qx, qy, t, d,
                         bends, dummy, tuple(pairs), mapping)


def check(handle: ProblemHandle, deadline: float | None = 300.0) -> BackendOutcome:
    """Run the solver with a wall-clock budget in seconds."""
    if deadline is not None and deadline <= 0:
        return BackendOutcome(Status.TIMEOUT)
    s = handle.solver
    if deadline is not None:
        s.set("timeout", max(1, int(deadline * 1000)))
    began = time.perf_counter()
    try:
        res = s.check()
    except z3.Z3Exception as exc:
        raise BackendFailure(str(exc)) from exc
    elapsed = time.perf_counter() - began
    if res == z3.sat:
        return BackendOutcome(Status.SAT, _extract(handle, s.model()), elapsed)
    if res == z3.unsat:
        return BackendOutcome(Status.UNSAT, None, elapsed)
    reason = s.reason_unknown()
    if reason in ("timeout", "canceled") or "timeout" in reason:
        return BackendOutcome(Status.TIMEOUT, None, elapsed)
    raise BackendFailure(f"solver returned unknown: {reason}")


def _extract(h: ProblemHandle, model: z3.ModelRef) -> Solution:
    def val(e) -> int:
        if isinstance(e, int):
            return e
        return model.eval(e, model_completion=True).as_long()

    coords = {i: Coord(val(h.qx[i]), val(h.qy[i])) for i in range(h.circuit.num_qubits)}
    sched = Schedule()
    for g in h.circuit.gates:
        sched.start[g.id] = val(h.t[g.id])
        sched.duration[g.id] = val(h.d[g.id])
    for j, (bx, by) in h.bends.items():
        sched.bend[j] = Coord(val(bx), val(by))
    if h.policy is RoutingPolicy.ONE_BEND:
        # CNOTs without routing constraints still get a deterministic bend
        for g in h.circuit.gates:
            if g.is_cnot and g.id not in sched.bend:
                sched.bend[g.id] = Coord(coords[g.control].x, coords[g.target].y)
    return Solution(Mapping(coords), sched, val(h.dummy))


def solve_once(circuit, machine, policy, t_max, deadline=300.0, **kwargs) -> BackendOutcome:
    return check(encode(circuit, machine, policy, t_max, **kwargs), deadline)

