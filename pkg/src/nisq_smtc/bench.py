"""Benchmark circuit generators and the suite runner.

All randomness comes from ``random.Random`` (Mersenne Twister, MT19937)
seeded explicitly, so generated circuits are identical across platforms
and Python versions that keep that generator.
"""
from __future__ import annotations

import csv
import json
import random
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .circuit import PROGRAM_GATES, Circuit, GateKind
from .errors import ConfigError, LengthMismatch
from .machine import MachineGrid, load_machine


def gen_bv(n: int, hidden: str) -> Circuit:
    """Bernstein-Vazirani on ``n`` qubits: data qubits ``0..n-2`` and the
    ancilla ``n-1``. Every qubit is measured, ``q[i]`` into ``c[i]``; the
    data bits read back ``hidden``."""
    if not hidden or len(hidden) != n - 1 or set(hidden) - {"0", "1"}:
        raise LengthMismatch(f"hidden string must be {n - 1} bits, got {hidden!r}")
    anc = n - 1
    ops: list[tuple] = [("x", anc), ("h", anc)]
    ops += [("h", i) for i in range(n - 1)]
    ops += [("cx", i, anc) for i, bit in enumerate(hidden) if bit == "1"]
    ops += [("h", i) for i in range(n - 1)]
    ops += [("measure", i, i) for i in range(n)]
    return Circuit.from_ops(n, ops, num_clbits=n)


def _draw(rng: random.Random, qubits: list[int], kind: GateKind) -> tuple:
    if kind is GateKind.CNOT:
        c, t = rng.sample(qubits, 2)
        return ("cx", c, t)
    return (kind.value, rng.choice(qubits))


def gen_random(qubits: int, gates: int, seed: int, measure_all: bool = False) -> Circuit:
    """``gates`` draws, each a kind uniform over the nine program gates, then
    operands uniform (CNOTs take an ordered pair of distinct qubits)."""
    rng = random.Random(seed)
    kinds = PROGRAM_GATES if qubits >= 2 else tuple(k for k in PROGRAM_GATES if k.arity == 1)
    pool = list(range(qubits))
    ops = [_draw(rng, pool, rng.choice(kinds)) for _ in range(gates)]
    if measure_all:
        ops += [("measure", q, q) for q in range(qubits)]
    return Circuit.from_ops(qubits, ops, num_clbits=qubits if measure_all else 0)


def gen_layered(qubits: int, depth: int, seed: int) -> Circuit:
    """``qubits * depth`` gates packed into layers that touch each qubit at
    most once. A CNOT fills two slots of its layer, so the number of
    layers can run past ``depth``."""
    rng = random.Random(seed)
    target = qubits * depth
    ops: list[tuple] = []
    while len(ops) < target:
        free = list(range(qubits))
        rng.shuffle(free)
        while free and len(ops) < target:
            kind = rng.choice(PROGRAM_GATES)
            if kind is GateKind.CNOT:
                if len(free) < 2:
                    break
                ops.append(("cx", free.pop(), free.pop()))
            else:
                ops.append((kind.value, free.pop()))
    return Circuit.from_ops(qubits, ops)


@dataclass(frozen=True)
class BenchSpec:
    kind: str
    params: tuple

    @classmethod
    def parse(cls, text: str) -> "BenchSpec":
        """``bv:6:00111``, ``random:8:64:1`` or ``layered:16:4:7``."""
        kind, *rest = text.strip().split(":")
        try:
            if kind == "bv" and len(rest) == 2:
                return cls(kind, (int(rest[0]), rest[1]))
            if kind in ("random", "layered") and len(rest) == 3:
                return cls(kind, tuple(int(v) for v in rest))
        except ValueError:
            pass
        raise ConfigError(f"bad benchmark spec {text!r}")

    def build(self) -> Circuit:
        if self.kind == "bv":
            return gen_bv(*self.params)
        if self.kind == "random":
            return gen_random(*self.params)
        return gen_layered(*self.params)

    def __str__(self) -> str:
        return ":".join([self.kind, *map(str, self.params)])


@dataclass
class RunReport:
    spec: str
    machine: str
    algorithm: str
    policy: str
    status: str = "error"
    makespan: int | None = None
    bounds: tuple[int, int] | None = None
    eta: float | None = None
    compile_time: float = 0.0
    swap_count: int | None = None
    fits_coherence: bool | None = None
    validated_makespan: int | None = None
    valid: bool | None = None
    timings: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.spec, self.machine)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bounds"] = list(self.bounds) if self.bounds else None
        return d


def run_one(spec: BenchSpec | str, machine: MachineGrid | str, algorithm: str = "heur",
            policy: str = "rr", probe_timeout: float = 300.0, job_timeout: float = 86400.0) -> RunReport:
    # local imports keep worker start-up light and avoid import cycles
    from .emitter import route_all
    from .heuristic import heuristic_compile
    from .search import opt_compile
    from .validator import validate

    spec = BenchSpec.parse(spec) if isinstance(spec, str) else spec
    mname = machine if isinstance(machine, str) else machine.name
    rep = RunReport(str(spec), mname, algorithm, str(policy))
    try:
        m = load_machine(machine) if isinstance(machine, str) else machine
        circuit = spec.build()
        t0 = time.perf_counter()
        if algorithm == "opt":
            res = opt_compile(circuit, m, policy, probe_timeout=probe_timeout, job_timeout=job_timeout)
        elif algorithm == "heur":
            res = heuristic_compile(circuit, m, policy, probe_timeout=probe_timeout)
        else:
            raise ConfigError(f"unknown algorithm {algorithm!r}")
        rep.compile_time = time.perf_counter() - t0
        rep.status = res.status.value
        rep.makespan = res.makespan
        rep.bounds = res.bounds
        rep.eta = float(res.eta) if res.eta is not None else None
        rep.timings = dict(res.details.get("timings", {}))
        if res.schedule is not None:
            routed = route_all(circuit, res.mapping, res.schedule, res.policy)
            rep.swap_count = sum(len(r.forward_swaps) + len(r.restore_swaps) for r in routed.values())
            rep.fits_coherence = res.schedule.max_finish() <= m.coherence if len(res.schedule) else True
            check = validate(circuit, m.with_coherence(max(m.coherence, res.schedule.max_finish()
                                                            if len(res.schedule) else 0)),
                             res.mapping, res.schedule, res.policy, routed)
            rep.valid = check.ok
            rep.validated_makespan = check.makespan
    except Exception as exc:  # a failed cell must not stop the suite
        rep.error = f"{type(exc).__name__}: {exc}"
        rep.timings["traceback"] = traceback.format_exc(limit=3)
    return rep


def run_suite(specs, machines, algorithm: str = "heur", policy: str = "rr", *, jobs: int = 1,
              probe_timeout: float = 300.0, job_timeout: float = 86400.0,
              out_dir: str | Path | None = None) -> list[RunReport]:
    """One report per (spec, machine) cell, ordered by cell key. With
    ``out_dir`` set, also writes ``suite.csv`` and ``suite.json`` there."""
    specs = [BenchSpec.parse(s) if isinstance(s, str) else s for s in specs]
    cells = [(s, m) for s in specs for m in machines]
    args = [(s, m, algorithm, policy, probe_timeout, job_timeout) for s, m in cells]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(run_one, *zip(*args)))
    else:
        reports = [run_one(*a) for a in args]
    reports.sort(key=lambda r: r.key)
    if out_dir is not None:
        write_reports(reports, out_dir)
    return reports


def write_reports(reports: list[RunReport], out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [r.to_dict() for r in reports]
    (out / "suite.json").write_text(json.dumps(rows, indent=2, default=str))
    cols = [k for k in rows[0] if k not in ("timings",)] if rows else []
    with open(out / "suite.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)
