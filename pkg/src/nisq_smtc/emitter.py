"""Turn a mapped schedule into OpenQASM: concrete swap paths for each CNOT
(with the restoring sequence), direction fix-ups, timing comments."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .circuit import Circuit, Gate, GateKind
from .encoding import RoutingPolicy
from .errors import DirectionUnsatisfiable, PathOutsideReservation
from .heuristic import bend_options, route_region
from .machine import Coord, MachineGrid, l1_distance
from .schedule import Mapping, Schedule, makespan

Edge = tuple[Coord, Coord]


@dataclass(frozen=True)
class RoutedCnot:
    gate_id: int
    forward_swaps: tuple[Edge, ...]
    hw_cnot_edge: Edge
    restore_swaps: tuple[Edge, ...]

    @property
    def cells(self) -> list[Coord]:
        cells = [e[0] for e in self.forward_swaps] + list(self.hw_cnot_edge)
        return list(dict.fromkeys(cells))


@dataclass
class EmittedProgram:
    qasm_text: str
    # (start slot, op name, hardware indices, classical bit or None)
    instructions: list[tuple[int, str, tuple[int, ...], int | None]]
    stats: dict = field(default_factory=dict)


def _walk(a: Coord, b: Coord) -> list[Coord]:
    """Cells from ``a`` to ``b`` along one axis, ``a`` excluded."""
    if a.x != b.x and a.y != b.y:
        raise PathOutsideReservation(f"{a} -> {b} is not a straight segment")
    out = []
    x, y = a
    while (x, y) != tuple(b):
        if x != b.x:
            x += 1 if b.x > x else -1
        else:
            y += 1 if b.y > y else -1
        out.append(Coord(x, y))
    return out


def _inside(c: Coord, region) -> bool:
    return any(r[0] <= c.x <= r[2] and r[1] <= c.y <= r[3] for r in region)


def realize_path(gate: Gate, mapping: Mapping, policy=RoutingPolicy.RECTANGLE,
                 bend: Coord | None = None) -> RoutedCnot:
    """Concrete route for one CNOT.

    Rectangle reservation walks the control along its row index (x) to the
    target's row, then along y. One-bend routing walks control -> bend ->
    target; ``bend`` defaults to the (control row, target column) corner.
    """
    policy = RoutingPolicy.parse(policy)
    ctrl, targ = mapping[gate.control], mapping[gate.target]
    if policy is RoutingPolicy.RECTANGLE:
        corner = Coord(targ.x, ctrl.y)
        region = route_region(policy, ctrl, targ)
    else:
        corner = bend if bend is not None else bend_options(ctrl, targ)[0]
        if corner not in (Coord(ctrl.x, targ.y), Coord(targ.x, ctrl.y)):
            raise PathOutsideReservation(f"gate {gate.id}: {corner} is not a one-bend junction")
        region = route_region(policy, ctrl, targ, corner)
    path = [ctrl] + _walk(ctrl, corner) + _walk(corner, targ)
    if len(path) - 1 != l1_distance(ctrl, targ):
        raise PathOutsideReservation(f"gate {gate.id}: path length mismatch")
    for c in path:
        if not _inside(c, region):
            raise PathOutsideReservation(f"gate {gate.id}: {c} outside reserved region")
    forward = tuple((path[k], path[k + 1]) for k in range(len(path) - 2))
    restore = tuple((b, a) for a, b in reversed(forward))
    return RoutedCnot(gate.id, forward, (path[-2], path[-1]), restore)


def route_all(circuit: Circuit, mapping: Mapping, schedule: Schedule, policy) -> dict[int, RoutedCnot]:
    return {g.id: realize_path(g, mapping, policy, schedule.bend.get(g.id))
            for g in circuit.gates if g.is_cnot}


def _cx(machine: MachineGrid, a: Coord, b: Coord) -> list[tuple[str, tuple[Coord, ...]]]:
    direction = machine.cnot_direction(a, b)
    if direction == "forward":
        return [("cx", (a, b))]
    if direction == "reverse":
        return [("h", (a,)), ("h", (b,)), ("cx", (b, a)), ("h", (a,)), ("h", (b,))]
    raise DirectionUnsatisfiable(f"edge {a}-{b} allows neither CNOT direction")


def _swap(machine: MachineGrid, a: Coord, b: Coord, decompose: bool):
    if not decompose:
        return [("swap", (a, b))]
    return _cx(machine, a, b) + _cx(machine, b, a) + _cx(machine, a, b)


def emit_qasm(circuit: Circuit, mapping: Mapping, schedule: Schedule, machine: MachineGrid,
              policy=RoutingPolicy.RECTANGLE, *, routed: dict[int, RoutedCnot] | None = None,
              swap_decompose: str = "native", emit_timing: bool = True) -> EmittedProgram:
    """Emit hardware-level QASM ordered by start slot (gate id breaks ties).

    Hardware qubit ``(x, y)`` is ``q[(x-1)*N + (y-1)]``.
    """
    if swap_decompose not in ("native", "cx"):
        raise ValueError("swap_decompose must be 'native' or 'cx'")
    decompose = swap_decompose == "cx"
    routed = routed if routed is not None else route_all(circuit, mapping, schedule, policy)
    tau = machine.durations
    ops: list[tuple[int, str, tuple[Coord, ...], int | None]] = []

    for gid in sorted(schedule.start, key=lambda g: (schedule.start[g], g)):
        g = circuit.gate(gid)
        t = schedule.start[gid]
        if g.kind is GateKind.MEASURE:
            ops.append((t, "measure", (mapping[g.operands[0]],), g.cbit))
        elif g.is_cnot:
            r = routed[gid]
            slot = t
            for a, b in r.forward_swaps:
                ops += [(slot, n, qs, None) for n, qs in _swap(machine, a, b, decompose)]
                slot += tau.swap
            ops += [(slot, n, qs, None) for n, qs in _cx(machine, *r.hw_cnot_edge)]
            slot += tau.cnot
            for a, b in r.restore_swaps:
                ops += [(slot, n, qs, None) for n, qs in _swap(machine, a, b, decompose)]
                slot += tau.swap
        else:
            ops.append((t, g.kind.value, (mapping[g.operands[0]],), None))

    reg = "q"
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg {reg}[{machine.size}];"]
    if circuit.num_clbits:
        lines.append(f"creg {circuit.creg}[{circuit.num_clbits}];")
    instructions = []
    for t, name, coords, cbit in ops:
        idx = tuple(machine.index(c) for c in coords)
        args = ",".join(f"{reg}[{i}]" for i in idx)
        if name == "measure":
            text = f"measure {args} -> {circuit.creg}[{cbit}];"
        else:
            text = f"{name} {args};"
        if emit_timing:
            text += f" // @t={t}"
        lines.append(text)
        instructions.append((t, name, idx, cbit))

    counts = Counter(name for _, name, _, _ in instructions)
    swaps = sum(len(r.forward_swaps) + len(r.restore_swaps) for r in routed.values())
    stats = {"gate_counts": dict(sorted(counts.items())), "swap_count": swaps,
             "makespan": makespan(schedule) if len(schedule) else 0,
             "hardware_qubits": machine.size}
    return EmittedProgram("\n".join(lines) + "\n", instructions, stats)
