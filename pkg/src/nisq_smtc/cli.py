"""``nisq-smtc`` command line."""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from fractions import Fraction
from pathlib import Path

from .bench import BenchSpec, run_suite
from .circuit import dump_qasm, parse_qasm
from .emitter import emit_qasm, route_all
from .encoding import RoutingPolicy, Status, encode
from .errors import CompilerError
from .heuristic import heuristic_compile
from .machine import load_machine
from .reports import compile_report, write_json
from .schedule import Mapping, Schedule
from .search import CompileStatus, opt_compile
from .simulator import simulate
from .validator import brute_force_optimal, validate

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID, EXIT_TIMEOUT = 0, 2, 3, 4
EXIT_ERROR = 1

_UNITS = {"": 1, "s": 1, "m": 60, "h": 3600, "d": 86400}


def parse_duration(text: str) -> float:
    """``300``, ``300s``, ``5m``, ``24h`` -> seconds."""
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*([smhd]?)\s*", str(text))
    if not m:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}")
    return float(m.group(1)) * _UNITS[m.group(2)]


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--machine", default="16", help="preset qubit count (8..256) or machine JSON file")
    p.add_argument("--policy", default="rr", choices=["rr", "1bp"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--report-dir", default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _compile_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default=None, help="write hardware QASM here")
    p.add_argument("--report", default=None, help="write a JSON report here")
    p.add_argument("--epsilon", type=Fraction, default=Fraction(1, 10))
    p.add_argument("--probe-timeout", type=parse_duration, default=300.0)
    p.add_argument("--strip-virtual", action="store_true")
    p.add_argument("--swap-decompose", choices=["native", "cx"], default="native")
    p.add_argument("--emit-timing", action=argparse.BooleanOptionalAction, default=True)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="nisq-smtc",
                                 description="Map, schedule and route circuits onto 2-D grids.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("opt", parents=[common], help="near-optimal compilation")
    _compile_flags(p)
    p.add_argument("--job-timeout", type=parse_duration, default=86400.0)
    p.add_argument("--dump-smt", default=None, help="write the full-window problem as SMT-LIB2")

    p = sub.add_parser("heur", parents=[common], help="greedy compilation with solver refinement")
    _compile_flags(p)
    p.add_argument("--refine", choices=["fit", "minimize"], default="fit")

    p = sub.add_parser("validate", parents=[common], help="check a mapping and schedule")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--schedule", required=True, help="JSON with 'mapping' and 'schedule' keys")

    p = sub.add_parser("oracle", parents=[common], help="exhaustive optimum for tiny instances")
    p.add_argument("--in", dest="input", required=True)

    p = sub.add_parser("sim", parents=[common], help="exact outcome distribution")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--max-qubits", type=int, default=10)

    p = sub.add_parser("gen", parents=[common], help="generate a benchmark circuit")
    p.add_argument("spec", help="bv:N:BITS, random:Q:G[:SEED] or layered:Q:D[:SEED]")
    p.add_argument("--measure-all", action="store_true", help="random circuits: measure every qubit")
    p.add_argument("--out", default=None)

    p = sub.add_parser("suite", parents=[common], help="run a benchmark grid")
    p.add_argument("specs", nargs="+")
    p.add_argument("--machines", nargs="+", default=None)
    p.add_argument("--algorithm", choices=["opt", "heur"], default="heur")
    p.add_argument("--probe-timeout", type=parse_duration, default=300.0)
    p.add_argument("--job-timeout", type=parse_duration, default=86400.0)
    return ap


def _spec(text: str, seed: int) -> BenchSpec:
    parts = text.split(":")
    if parts[0] in ("random", "layered") and len(parts) == 3:
        text = f"{text}:{seed}"
    return BenchSpec.parse(text)


def _finish_compile(args, circuit, machine, result, timed_out: bool) -> int:
    code = EXIT_OK
    emitted = check = None
    if result.schedule is not None:
        routed = route_all(circuit, result.mapping, result.schedule, result.policy)
        check = validate(circuit, machine, result.mapping, result.schedule, result.policy, routed)
        emitted = emit_qasm(circuit, result.mapping, result.schedule, machine, result.policy,
                            routed=routed, swap_decompose=args.swap_decompose,
                            emit_timing=args.emit_timing)
        if args.out:
            Path(args.out).write_text(emitted.qasm_text)
        elif not args.report:
            sys.stdout.write(emitted.qasm_text)
    report = compile_report(result, machine, emitted, check)
    if args.report:
        write_json(report, args.report)
    elif args.report_dir:
        write_json(report, Path(args.report_dir) / f"{Path(args.input).stem}.{args.command}.json")
    print(f"{result.status.value}: makespan={result.makespan} bounds={result.bounds} "
          f"time={result.compile_time:.2f}s", file=sys.stderr)

    if result.status in (CompileStatus.INFEASIBLE, CompileStatus.NO_FEASIBLE_SOLUTION):
        code = EXIT_TIMEOUT if timed_out else EXIT_INFEASIBLE
    elif timed_out or result.status is CompileStatus.BEST_EFFORT:
        code = EXIT_TIMEOUT
    if check is not None and result.ok and not check.ok:
        for v in check.violations:
            print(f"violation {v.kind} {v.gates}: {v.detail}", file=sys.stderr)
        code = EXIT_INVALID
    return code


def cmd_opt(args) -> int:
    machine = load_machine(args.machine)
    circuit = parse_qasm(_read(args.input))
    if args.dump_smt:
        Path(args.dump_smt).write_text(encode(circuit, machine, args.policy, machine.coherence).to_smt2())
    res = opt_compile(circuit, machine, args.policy, args.epsilon, probe_timeout=args.probe_timeout,
                      job_timeout=args.job_timeout, strip_virtual=args.strip_virtual)
    timed_out = any(p.status is Status.TIMEOUT for p in res.probes) or res.status is CompileStatus.BEST_EFFORT
    return _finish_compile(args, circuit, machine, res, timed_out)


def cmd_heur(args) -> int:
    machine = load_machine(args.machine)
    circuit = parse_qasm(_read(args.input))
    res = heuristic_compile(circuit, machine, args.policy, refine=args.refine,
                            probe_timeout=args.probe_timeout, epsilon=args.epsilon,
                            strip_virtual=args.strip_virtual)
    timed_out = any(p.status is Status.TIMEOUT for p in res.probes)
    return _finish_compile(args, circuit, machine, res, timed_out)


def cmd_validate(args) -> int:
    machine = load_machine(args.machine)
    circuit = parse_qasm(_read(args.input))
    data = json.loads(_read(args.schedule))
    rep = validate(circuit, machine, Mapping.from_dict(data["mapping"]),
                   Schedule.from_dict(data["schedule"]), args.policy)
    out = {"ok": rep.ok, "makespan": rep.makespan, "fits_coherence": rep.fits_coherence,
           "violations": [{"kind": v.kind, "gates": list(v.gates), "detail": v.detail}
                          for v in rep.violations]}
    print(json.dumps(out, indent=2))
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_oracle(args) -> int:
    machine = load_machine(args.machine)
    circuit = parse_qasm(_read(args.input))
    res = brute_force_optimal(circuit, machine, args.policy)
    mapping, sched = res.witness
    print(json.dumps({"optimal_makespan": res.optimal_makespan, "explored": res.explored,
                      "mapping": mapping.to_dict(), "schedule": sched.to_dict()}, indent=2))
    return EXIT_OK


def cmd_sim(args) -> int:
    dist = simulate(_read(args.input), max_qubits=args.max_qubits)
    print(json.dumps(dict(sorted(dist.items())), indent=2))
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = _spec(args.spec, args.seed)
    if spec.kind == "random" and args.measure_all:
        from .bench import gen_random
        circuit = gen_random(*spec.params, measure_all=True)
    else:
        circuit = spec.build()
    text = dump_qasm(circuit)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_suite(args) -> int:
    specs = [_spec(s, args.seed) for s in args.specs]
    machines = args.machines or [args.machine]
    reports = run_suite(specs, machines, args.algorithm, args.policy, jobs=args.jobs,
                        probe_timeout=args.probe_timeout, job_timeout=args.job_timeout,
                        out_dir=args.report_dir)
    for r in reports:
        print(f"{r.spec}\t{r.machine}\t{r.status}\tmakespan={r.makespan}\t"
              f"time={r.compile_time:.2f}s" + (f"\terror={r.error}" if r.error else ""))
    if any(r.valid is False for r in reports):
        return EXIT_INVALID
    return EXIT_OK


COMMANDS = {"opt": cmd_opt, "heur": cmd_heur, "validate": cmd_validate, "oracle": cmd_oracle,
            "sim": cmd_sim, "gen": cmd_gen, "suite": cmd_suite}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.policy = RoutingPolicy.parse(args.policy)
    try:
        return COMMANDS[args.command](args)
    except CompilerError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
