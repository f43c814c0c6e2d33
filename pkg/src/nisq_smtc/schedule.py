"""Mapping and schedule containers shared by compilers, emitter and validator."""
from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import VirtualStrip
from .errors import EmptySchedule
from .machine import Coord


@dataclass(frozen=True)
class Mapping:
    """Program qubit -> hardware coordinate."""

    coords: dict[int, Coord]

    def __getitem__(self, q: int) -> Coord:
        return self.coords[q]

    def __len__(self) -> int:
        return len(self.coords)

    def items(self):
        return sorted(self.coords.items())

    def is_injective(self) -> bool:
        return len(set(self.coords.values())) == len(self.coords)

    def inverse(self) -> dict[Coord, int]:
        return {c: q for q, c in self.coords.items()}

    def to_dict(self) -> dict:
        return {str(q): list(c) for q, c in self.items()}

    @classmethod
    def from_dict(cls, data: dict) -> "Mapping":
        return cls({int(q): Coord(*c) for q, c in data.items()})


@dataclass
class Schedule:
    """Start time and duration per gate id; ``bend`` holds the junction
    chosen for each CNOT under one-bend routing."""

    start: dict[int, int] = field(default_factory=dict)
    duration: dict[int, int] = field(default_factory=dict)
    bend: dict[int, Coord] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.start)

    def finish(self, gid: int) -> int:
        return self.start[gid] + self.duration[gid]

    def max_finish(self) -> int:
        return max((self.finish(g) for g in self.start), default=0)

    def makespan(self) -> int:
        return makespan(self)

    def to_dict(self) -> dict:
        out = []
        for gid in sorted(self.start):
            entry = {"id": gid, "t": self.start[gid], "d": self.duration[gid]}
            if gid in self.bend:
                entry["bend"] = list(self.bend[gid])
            out.append(entry)
        return {"gates": out}

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        s = cls()
        for entry in data["gates"]:
            gid = int(entry["id"])
            s.start[gid] = int(entry["t"])
            s.duration[gid] = int(entry["d"])
            if entry.get("bend") is not None:
                s.bend[gid] = Coord(*entry["bend"])
        return s


def makespan(schedule: Schedule) -> int:
    """Finish of the last gate minus start of the first."""
    if not schedule.start:
        raise EmptySchedule("makespan of an empty schedule")
    first = min(schedule.start.values())
    return schedule.max_finish() - first


def restore_virtual(strip: VirtualStrip, reduced: Schedule) -> Schedule:
    """Lift a schedule of ``strip.reduced`` back onto the original circuit.

    Removed gates take duration 0 and start with their successor on the
    same qubit, or at their predecessor's finish when nothing follows.
    """
    full = Schedule()
    for new_id, old_id in enumerate(strip.kept, start=1):
        full.start[old_id] = reduced.start[new_id]
        full.duration[old_id] = reduced.duration[new_id]
        if new_id in reduced.bend:
            full.bend[old_id] = reduced.bend[new_id]
    for gid, succ, pred in strip.removed:
        if succ is not None:
            t = full.start[succ]
        elif pred is not None:
            t = full.finish(pred)
        else:
            t = 1
        full.start[gid] = t
        full.duration[gid] = 0
    return full
