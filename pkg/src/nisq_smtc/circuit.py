"""Gate-level circuit IR: QASM subset parsing, dependency DAG, and
concurrency analysis over the DAG's transitive closure.

Gate ids are 1-based and dense; qubit ids are 0-based as in QASM.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (ArityMismatch, CycleDetected, MalformedSyntax,
                     ReuseAfterMeasure, UndeclaredQubit, UnknownGate)


class GateKind(Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    CNOT = "cx"
    MEASURE = "measure"
    SWAP = "swap"

    @property
    def arity(self) -> int:
        return 2 if self in (GateKind.CNOT, GateKind.SWAP) else 1

    @property
    def is_virtual(self) -> bool:
        """Zero-duration phase gates."""
        return self in _VIRTUAL


_VIRTUAL = frozenset({GateKind.Z, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG})

# The nine-gate set random programs draw from.
PROGRAM_GATES = (GateKind.CNOT, GateKind.H, GateKind.X, GateKind.Y, GateKind.Z,
                 GateKind.T, GateKind.S, GateKind.TDG, GateKind.SDG)


@dataclass(frozen=True)
class Gate:
    id: int
    kind: GateKind
    operands: tuple[int, ...]
    cbit: int | None = None

    @property
    def control(self) -> int:
        return self.operands[0]

    @property
    def target(self) -> int:
        return self.operands[-1]

    @property
    def is_cnot(self) -> bool:
        return self.kind is GateKind.CNOT


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]
    deps: frozenset[tuple[int, int]]
    num_clbits: int = 0
    qreg: str = "q"
    creg: str = "c"

    def __post_init__(self):
        for pos, g in enumerate(self.gates, start=1):
            if g.id != pos:
                raise ValueError(f"gate ids must be dense and 1-based, got {g.id} at {pos}")
            if len(g.operands) != g.kind.arity:
                raise ArityMismatch(f"{g.kind.value} takes {g.kind.arity} operand(s)")
            if len(set(g.operands)) != len(g.operands):
                raise ArityMismatch(f"gate {g.id}: operands must be distinct")
            for q in g.operands:
                if not 0 <= q < self.num_qubits:
                    raise UndeclaredQubit(f"gate {g.id}: qubit {q} out of range")

    @classmethod
    def from_ops(cls, num_qubits: int, ops: Iterable[Sequence], num_clbits: int | None = None) -> "Circuit":
        """Build from ``(name, q0[, q1])`` tuples; measure is ``("measure", q, c)``."""
        gates = []
        for i, op in enumerate(ops, start=1):
            kind = GateKind(op[0])
            if kind is GateKind.MEASURE:
                gates.append(Gate(i, kind, (int(op[1]),), int(op[2])))
            else:
                gates.append(Gate(i, kind, tuple(int(q) for q in op[1:])))
        if num_clbits is None:
            num_clbits = max((g.cbit + 1 for g in gates if g.cbit is not None), default=0)
        return cls(num_qubits, tuple(gates), build_deps(gates, num_qubits), num_clbits)

    def __len__(self) -> int:
        return len(self.gates)

    def gate(self, gid: int) -> Gate:
        return self.gates[gid - 1]

    @property
    def cnot_ids(self) -> list[int]:
        return [g.id for g in self.gates if g.is_cnot]

    def predecessors(self) -> dict[int, list[int]]:
        preds: dict[int, list[int]] = {g.id: [] for g in self.gates}
        for i, j in sorted(self.deps):
            preds[j].append(i)
        return preds

    def successors(self) -> dict[int, list[int]]:
        succs: dict[int, list[int]] = {g.id: [] for g in self.gates}
        for i, j in sorted(self.deps):
            succs[i].append(j)
        return succs


def build_deps(gates: Sequence[Gate], num_qubits: int) -> frozenset[tuple[int, int]]:
    """Link each gate to the most recent earlier gate on each of its operands."""
    last: list[int | None] = [None] * num_qubits
    edges = set()
    for g in gates:
        for q in g.operands:
            if last[q] is not None:
                edges.add((last[q], g.id))
            last[q] = g.id
    return frozenset(edges)


@dataclass(frozen=True)
class ConcurrencyInfo:
    """Reachability over gates (index ``id - 1``) and CNOT pairs that may overlap."""

    closure: np.ndarray = field(repr=False)
    cnot_pairs: frozenset[tuple[int, int]]

    def reaches(self, a: int, b: int) -> bool:
        return bool(self.closure[a - 1, b - 1])

    def related(self, a: int, b: int) -> bool:
        return self.reaches(a, b) or self.reaches(b, a)


def transitive_closure(circuit: Circuit) -> ConcurrencyInfo:
    n = len(circuit)
    if circuit.deps:
        src, dst = zip(*circuit.deps)
    else:
        src, dst = (), ()
    reach = kernels.closure_matrix(n, np.asarray(src, dtype=np.int64) - 1,
                                   np.asarray(dst, dtype=np.int64) - 1)
    if n and reach.diagonal().any():
        raise CycleDetected("dependency graph contains a cycle")
    reach = reach.astype(bool)
    reach.setflags(write=False)
    cnots = circuit.cnot_ids
    pairs = set()
    for a_pos, a in enumerate(cnots):
        row, col = reach[a - 1], reach[:, a - 1]
        for b in cnots[a_pos + 1:]:
            if not row[b - 1] and not col[b - 1]:
                pairs.add((a, b))
    return ConcurrencyInfo(reach, frozenset(pairs))


def all_cnot_pairs(circuit: Circuit) -> frozenset[tuple[int, int]]:
    """Every unordered CNOT pair, i.e. what routing needs without pruning."""
    cnots = circuit.cnot_ids
    return frozenset((a, b) for k, a in enumerate(cnots) for b in cnots[k + 1:])


# --- QASM subset -----------------------------------------------------------

_ARG = r"(\w+)\s*\[\s*(\d+)\s*\]"
_RE_HEADER = re.compile(r"OPENQASM\s+2(\.0)?")
_RE_INCLUDE = re.compile(r'include\s+"[^"]*"')
_RE_REG = re.compile(r"(qreg|creg)\s+(\w+)\s*\[\s*(\d+)\s*\]")
_RE_MEASURE = re.compile(rf"measure\s+{_ARG}\s*->\s*{_ARG}")
_RE_APPLY = re.compile(r"([A-Za-z_]\w*)\s+(.*)")
_RE_QARG = re.compile(rf"{_ARG}$")
_RE_NAME = re.compile(r"([A-Za-z_]\w*)")


def _statements(text: str):
    """Yield ``(statement, line)`` pairs split on ';' with comments removed."""
    buf: list[str] = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        for ch in line:
            if ch == ";":
                stmt = "".join(buf).strip()
                yield stmt, start if start is not None else lineno
                buf, start = [], None
            else:
                if start is None and not ch.isspace():
                    start = lineno
                buf.append(ch)
        buf.append(" ")
    rest = "".join(buf).strip()
    if rest:
        raise MalformedSyntax(f"missing ';' after {rest!r}", start)


def parse_qasm(text: str, *, compiled: bool = False) -> Circuit:
    """Parse the supported OpenQASM 2.0 subset.

    ``compiled=True`` accepts compiler output: ``swap`` is allowed, and
    routing may move other qubits through already-measured locations.
    """
    qreg = creg = None
    nq = nc = 0
    gates: list[Gate] = []
    measured: set[int] = set()

    def qubit(name: str, idx: str, line: int) -> int:
        if qreg is None or name != qreg or int(idx) >= nq:
            raise UndeclaredQubit(f"undeclared qubit {name}[{idx}]", line)
        return int(idx)

    for stmt, line in _statements(text):
        if not stmt:
            continue
        if _RE_HEADER.fullmatch(stmt) or _RE_INCLUDE.fullmatch(stmt):
            continue
        m = _RE_REG.fullmatch(stmt)
        if m:
            kind, name, size = m.group(1), m.group(2), int(m.group(3))
            if kind == "qreg":
                if qreg is not None:
                    raise MalformedSyntax("only one qreg is supported", line)
                qreg, nq = name, size
            else:
                if creg is not None:
                    raise MalformedSyntax("only one creg is supported", line)
                creg, nc = name, size
            continue
        m = _RE_MEASURE.fullmatch(stmt)
        if m:
            q = qubit(m.group(1), m.group(2), line)
            if creg is None or m.group(3) != creg or int(m.group(4)) >= nc:
                raise UndeclaredQubit(f"undeclared classical bit {m.group(3)}[{m.group(4)}]", line)
            if q in measured and not compiled:
                raise ReuseAfterMeasure(f"qubit {q} measured twice", line)
            gates.append(Gate(len(gates) + 1, GateKind.MEASURE, (q,), int(m.group(4))))
            measured.add(q)
            continue
        if stmt.startswith("measure"):
            raise MalformedSyntax(f"bad measure statement {stmt!r}", line)
        m = _RE_APPLY.fullmatch(stmt)
        if not m:
            name = _RE_NAME.match(stmt)
            if name and "(" in stmt:
                raise UnknownGate(f"unsupported gate {name.group(1)!r}", line)
            raise MalformedSyntax(f"cannot parse {stmt!r}", line)
        name, argtext = m.group(1), m.group(2)
        if name in ("qreg", "creg", "include", "OPENQASM"):
            raise MalformedSyntax(f"malformed {name} statement", line)
        try:
            kind = GateKind(name)
        except ValueError:
            raise UnknownGate(f"unsupported gate {name!r}", line) from None
        if kind is GateKind.MEASURE or (kind is GateKind.SWAP and not compiled):
            raise UnknownGate(f"unsupported gate {name!r}", line)
        args = [a.strip() for a in argtext.split(",")]
        qs = []
        for a in args:
            am = _RE_QARG.match(a)
            if not am:
                raise MalformedSyntax(f"bad qubit argument {a!r}", line)
            qs.append(qubit(am.group(1), am.group(2), line))
        if len(qs) != kind.arity:
            raise ArityMismatch(f"{name} takes {kind.arity} qubit(s), got {len(qs)}", line)
        if len(set(qs)) != len(qs):
            raise ArityMismatch(f"{name} operands must be distinct", line)
        if not compiled and measured.intersection(qs):
            raise ReuseAfterMeasure(f"gate {name} after measurement", line)
        gates.append(Gate(len(gates) + 1, kind, tuple(qs)))

    if qreg is None:
        raise MalformedSyntax("no qreg declared")
    return Circuit(nq, tuple(gates), build_deps(gates, nq), nc, qreg, creg or "c")


def dump_qasm(circuit: Circuit) -> str:
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg {circuit.qreg}[{circuit.num_qubits}];"]
    if circuit.num_clbits:
        lines.append(f"creg {circuit.creg}[{circuit.num_clbits}];")
    q = circuit.qreg
    for g in circuit.gates:
        if g.kind is GateKind.MEASURE:
            lines.append(f"measure {q}[{g.operands[0]}] -> {circuit.creg}[{g.cbit}];")
        else:
            lines.append(f"{g.kind.value} " + ",".join(f"{q}[{o}]" for o in g.operands) + ";")
    return "\n".join(lines) + "\n"


# --- virtual-gate stripping ------------------------------------------------

@dataclass(frozen=True)
class VirtualStrip:
    """A circuit with zero-duration phase gates removed, plus what is needed
    to put them back.

    ``kept[k]`` is the original id of reduced gate ``k + 1``. Each removed
    gate is anchored to the next kept gate on its qubit (``successor``) or,
    failing that, the last kept gate before it (``predecessor``).
    """

    original: Circuit
    reduced: Circuit
    kept: tuple[int, ...]
    removed: tuple[tuple[int, int | None, int | None], ...]


def strip_virtual(circuit: Circuit) -> VirtualStrip:
    kept = [g for g in circuit.gates if not g.kind.is_virtual]
    renum = {g.id: k for k, g in enumerate(kept, start=1)}
    reduced_gates = [Gate(renum[g.id], g.kind, g.operands, g.cbit) for g in kept]
    reduced = Circuit(circuit.num_qubits, tuple(reduced_gates),
                      build_deps(reduced_gates, circuit.num_qubits),
                      circuit.num_clbits, circuit.qreg, circuit.creg)
    removed = []
    for g in circuit.gates:
        if not g.kind.is_virtual:
            continue
        q = g.operands[0]
        succ = next((h.id for h in circuit.gates[g.id:]
                     if q in h.operands and not h.kind.is_virtual), None)
        pred = next((h.id for h in reversed(circuit.gates[:g.id - 1])
                     if q in h.operands and not h.kind.is_virtual), None)
        removed.append((g.id, succ, pred))
    return VirtualStrip(circuit, reduced, tuple(g.id for g in kept), tuple(removed))
