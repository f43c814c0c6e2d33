"""Exact state-vector simulation for small programs.

Outcome distributions are keyed by classical bitstrings with character
``k`` holding ``c[k]``.
"""
from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, GateKind, parse_qasm
from .errors import TooManyQubits, UnsupportedGate

_S2 = 1 / math.sqrt(2)
_T = np.exp(1j * math.pi / 4)
_ONE_QUBIT = {
    GateKind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, _T]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, np.conj(_T)]], dtype=complex),
}


def _apply_1q(psi, n, q, u):
    ax = n - 1 - q
    v = psi.reshape([2] * n)
    v = np.moveaxis(np.tensordot(u, v, axes=([1], [ax])), 0, ax)
    return np.ascontiguousarray(v).reshape(-1)


def _apply_cx(psi, n, c, t):
    v = psi.reshape([2] * n).copy()
    ac, at = n - 1 - c, n - 1 - t
    sel = [slice(None)] * n
    sel[ac] = 1
    sub = v[tuple(sel)]
    v[tuple(sel)] = np.flip(sub, axis=at if at < ac else at - 1)
    return v.reshape(-1)


def simulate(program: str | Circuit, max_qubits: int = 10) -> dict[str, float]:
    """Exact measurement distribution of ``program`` started in |0...0>.

    SWAPs are applied as relabelings, so only wires some other instruction
    touches take up simulated qubits, and only those count toward
    ``max_qubits``. A measured wire that is acted on again later is first
    copied onto a fresh ancilla, which gives the same statistics as
    measuring it there.
    """
    circuit = parse_qasm(program, compiled=True) if isinstance(program, str) else program

    # follow wires through swaps
    where = list(range(circuit.num_qubits))  # hardware position -> wire
    wires_of: list[tuple[int, ...]] = []
    last_touch: dict[int, int] = {}
    for g in circuit.gates:
        if g.kind is GateKind.SWAP:
            a, b = g.operands
            where[a], where[b] = where[b], where[a]
            wires_of.append(())
            continue
        ws = tuple(where[q] for q in g.operands)
        wires_of.append(ws)
        for w in ws:
            last_touch[w] = g.id
    active = sorted(last_touch)
    if len(active) > max_qubits:
        raise TooManyQubits(f"{len(active)} active qubits exceeds limit {max_qubits}")
    slot = {w: k for k, w in enumerate(active)}
    n_anc = sum(1 for g, ws in zip(circuit.gates, wires_of)
                if g.kind is GateKind.MEASURE and last_touch[ws[0]] != g.id)
    n = len(active) + n_anc

    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1.0
    reads: dict[int, int] = {}  # classical bit -> simulated qubit
    next_anc = len(active)
    for g, ws in zip(circuit.gates, wires_of):
        if g.kind is GateKind.SWAP:
            continue
        qs = [slot[w] for w in ws]
        if g.kind is GateKind.MEASURE:
            if last_touch[ws[0]] == g.id:
                reads[g.cbit] = qs[0]
            else:
                psi = _apply_cx(psi, n, qs[0], next_anc)
                reads[g.cbit] = next_anc
                next_anc += 1
        elif g.kind is GateKind.CNOT:
            psi = _apply_cx(psi, n, qs[0], qs[1])
        elif g.kind in _ONE_QUBIT:
            psi = _apply_1q(psi, n, qs[0], _ONE_QUBIT[g.kind])
        else:
            raise UnsupportedGate(g.kind.value)

    probs = np.abs(psi) ** 2
    nbits = circuit.num_clbits
    basis = np.arange(2 ** n, dtype=np.int64)
    key = np.zeros(2 ** n, dtype=np.int64)
    for cbit, q in reads.items():
        key |= ((basis >> q) & 1) << cbit
    totals = np.bincount(key, weights=probs, minlength=1)
    out = {}
    for k in np.nonzero(totals > 1e-15)[0]:
        bits = "".join(str((int(k) >> b) & 1) for b in range(nbits))
        out[bits] = float(totals[k])
    return out


def total_variation(p: dict[str, float], q: dict[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
