"""Constraint-based mapping, scheduling and routing of quantum circuits
onto 2-D qubit grids."""
from __future__ import annotations

from .bench import BenchSpec, RunReport, gen_bv, gen_layered, gen_random, run_suite
from .circuit import Circuit, Gate, GateKind, dump_qasm, parse_qasm, transitive_closure
from .emitter import emit_qasm, realize_path, route_all
from .encoding import RoutingPolicy, Status, check, encode
from .heuristic import greedy_map, greedy_schedule, heuristic_compile
from .kernels import BACKEND
from .machine import Coord, GateDurations, MachineGrid, load_machine, standard_grid
from .schedule import Mapping, Schedule, makespan
from .search import CompileResult, CompileStatus, opt_compile
from .simulator import simulate, total_variation
from .validator import brute_force_optimal, validate

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BenchSpec", "Circuit", "CompileResult", "CompileStatus", "Coord", "Gate",
    "GateDurations", "GateKind", "MachineGrid", "Mapping", "RoutingPolicy", "RunReport",
    "Schedule", "Status", "brute_force_optimal", "check", "dump_qasm", "emit_qasm", "encode",
    "gen_bv", "gen_layered", "gen_random", "greedy_map", "greedy_schedule", "heuristic_compile",
    "load_machine", "makespan", "opt_compile", "parse_qasm", "realize_path", "route_all",
    "run_suite", "simulate", "standard_grid", "total_variation", "transitive_closure", "validate",
]
