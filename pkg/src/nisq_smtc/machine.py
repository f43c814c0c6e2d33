"""Grid machine model: dimensions, gate durations, coherence window,
optional CNOT edge directions, and distance/duration arithmetic.

Time is measured in integer timeslots (one control pulse, ~80 ns).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterator, NamedTuple

from .circuit import GateKind
from .errors import ConfigError, UnsupportedSize, ZeroDistance

TIMESLOT_NS = 80


class Coord(NamedTuple):
    x: int  # row, 1..M
    y: int  # column, 1..N

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


@dataclass(frozen=True)
class GateDurations:
    cnot: int = 8
    measure: int = 5
    x: int = 2
    y: int = 2
    h: int = 1
    z: int = 0
    s: int = 0
    sdg: int = 0
    t: int = 0
    tdg: int = 0
    swap: int = 24

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ConfigError(f"duration of {f.name} must be >= 0")

    def of(self, kind: GateKind) -> int:
        return getattr(self, _FIELD[kind])

    def with_overrides(self, overrides: dict) -> "GateDurations":
        names = {f.name for f in fields(self)}
        clean = {}
        for key, value in overrides.items():
            name = _ALIASES.get(key.lower(), key.lower())
            if name not in names:
                raise ConfigError(f"unknown gate in durations: {key!r}")
            clean[name] = int(value)
        return replace(self, **clean)


_FIELD = {GateKind.CNOT: "cnot", GateKind.MEASURE: "measure", GateKind.X: "x",
          GateKind.Y: "y", GateKind.H: "h", GateKind.Z: "z", GateKind.S: "s",
          GateKind.SDG: "sdg", GateKind.T: "t", GateKind.TDG: "tdg", GateKind.SWAP: "swap"}
_ALIASES = {"cx": "cnot", "measure": "measure", "s†": "sdg", "t†": "tdg"}

# qubits -> (rows, cols, coherence window in timeslots)
STANDARD_GRIDS = {
    8: (2, 4, 625),
    16: (2, 8, 1250),
    32: (4, 8, 2500),
    64: (8, 8, 5000),
    128: (8, 16, 10000),
    256: (16, 16, 20000),
}


@dataclass(frozen=True)
class MachineGrid:
    rows: int
    cols: int
    coherence: int
    durations: GateDurations = field(default_factory=GateDurations)
    # allowed (control, target) hardware edges; None means bidirectional
    directed_edges: frozenset[tuple[Coord, Coord]] | None = None
    name: str = ""

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.coherence < 1:
            raise ConfigError("rows, cols and coherence must all be >= 1")
        if self.directed_edges is not None:
            for a, b in self.directed_edges:
                if not (self.in_bounds(a) and self.in_bounds(b)) or l1_distance(a, b) != 1:
                    raise ConfigError(f"directed edge {a}->{b} is not a grid edge")

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @property
    def M(self) -> int:
        return self.rows

    @property
    def N(self) -> int:
        return self.cols

    def coords(self) -> Iterator[Coord]:
        for x in range(1, self.rows + 1):
            for y in range(1, self.cols + 1):
                yield Coord(x, y)

    def in_bounds(self, c) -> bool:
        return 1 <= c[0] <= self.rows and 1 <= c[1] <= self.cols

    def neighbors(self, c: Coord) -> list[Coord]:
        out = []
        for dx, dy in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            n = Coord(c[0] + dx, c[1] + dy)
            if self.in_bounds(n):
                out.append(n)
        return out

    def degree(self, c: Coord) -> int:
        return len(self.neighbors(c))

    def index(self, c) -> int:
        """Row-major hardware qubit index used in emitted QASM."""
        return (c[0] - 1) * self.cols + (c[1] - 1)

    def coord(self, index: int) -> Coord:
        return Coord(index // self.cols + 1, index % self.cols + 1)

    def duration(self, kind: GateKind) -> int:
        return self.durations.of(kind)

    def cnot_direction(self, a: Coord, b: Coord) -> str:
        """'forward' if a hardware cx may run a->b, 'reverse' if only b->a."""
        if l1_distance(a, b) != 1:
            raise ConfigError(f"{a} and {b} are not adjacent")
        if self.directed_edges is None or (a, b) in self.directed_edges:
            return "forward"
        if (b, a) in self.directed_edges:
            return "reverse"
        return "none"

    def with_coherence(self, coherence: int) -> "MachineGrid":
        return replace(self, coherence=coherence)

    def to_dict(self) -> dict:
        d = {"rows": self.rows, "cols": self.cols, "coherence_timeslots": self.coherence,
             "durations": {f.name: getattr(self.durations, f.name) for f in fields(self.durations)}}
        if self.directed_edges is not None:
            d["directed_edges"] = [[list(a), list(b)] for a, b in sorted(self.directed_edges)]
        if self.name:
            d["name"] = self.name
        return d


def l1_distance(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def cnot_duration(dist: int, durations: GateDurations | None = None) -> int:
    """Swap-in, hardware CNOT, swap-back duration for a control moved ``dist`` hops."""
    if dist < 1:
        raise ZeroDistance("control and target mapped to the same hardware qubit")
    tau = durations or GateDurations()
    return 2 * (dist - 1) * tau.swap + tau.cnot


def standard_grid(qubits: int) -> MachineGrid:
    if qubits not in STANDARD_GRIDS:
        raise UnsupportedSize(f"no standard grid for {qubits} qubits; "
                              f"choose one of {sorted(STANDARD_GRIDS)} or a config file")
    m, n, coherence = STANDARD_GRIDS[qubits]
    return MachineGrid(m, n, coherence, name=f"grid-{qubits}")


def machine_from_dict(data: dict) -> MachineGrid:
    try:
        rows, cols = int(data["rows"]), int(data["cols"])
        coherence = int(data["coherence_timeslots"])
    except KeyError as exc:
        raise ConfigError(f"machine config missing field {exc.args[0]!r}") from None
    durations = GateDurations().with_overrides(data.get("durations", {}))
    edges = data.get("directed_edges")
    if edges is not None:
        edges = frozenset((Coord(*a), Coord(*b)) for a, b in edges)
    return MachineGrid(rows, cols, coherence, durations, edges, data.get("name", ""))


def load_machine(spec: str) -> MachineGrid:
    """Resolve ``--machine``: a preset (``16``, ``grid-16``) or a JSON file."""
    key = spec.lower().removeprefix("grid-").removeprefix("grid")
    if key.isdigit() and not Path(spec).exists():
        return standard_grid(int(key))
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"unknown machine preset or missing file: {spec}")
    return machine_from_dict(json.loads(path.read_text()))
