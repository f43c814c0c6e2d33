"""JSON reports for single compilations."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .machine import TIMESLOT_NS
from .search import CompileResult


def _jsonable(v):
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator, "value": float(v)}
    if isinstance(v, tuple):
        return list(v)
    if hasattr(v, "value"):  # enums
        return v.value
    return v


def compile_report(result: CompileResult, machine=None, emitted=None, validation=None) -> dict:
    """Plain-dict summary of a compilation, ready for ``json.dump``."""
    rep = {
        "algorithm": result.algorithm,
        "policy": result.policy.value,
        "status": result.status.value,
        "makespan": result.makespan,
        "makespan_ns": result.makespan * TIMESLOT_NS if result.makespan is not None else None,
        "bounds": _jsonable(result.bounds),
        "eta": _jsonable(result.eta),
        "dummy_start": result.dummy_start,
        "compile_time": result.compile_time,
        "probes": [{"t_max": p.t_max, "status": p.status.value, "elapsed": p.elapsed}
                   for p in result.probes],
        "details": {k: _jsonable(v) for k, v in result.details.items()},
        "mapping": result.mapping.to_dict() if result.mapping is not None else None,
        "schedule": result.schedule.to_dict() if result.schedule is not None else None,
    }
    if machine is not None:
        rep["machine"] = machine.to_dict()
    if emitted is not None:
        rep["emitted"] = emitted.stats
    if validation is not None:
        rep["validation"] = {"ok": validation.ok,
                             "violations": [{"kind": v.kind, "gates": list(v.gates), "detail": v.detail}
                                            for v in validation.violations]}
    return rep


def write_json(obj, path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(obj, indent=2, default=str) + "\n")
