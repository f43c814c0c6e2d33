"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the dependency closure and the earliest-start search on their own,
then a full greedy compile with each backend swapped in.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from nisq_smtc import _pykernels, kernels
from nisq_smtc.bench import gen_layered, gen_random
from nisq_smtc.heuristic import heuristic_compile
from nisq_smtc.machine import standard_grid

try:
    from nisq_smtc import _ckernels
except ImportError:
    _ckernels = None


def closure_args(gates):
    c = gen_random(32, gates, 7)
    src, dst = zip(*c.deps)
    return len(c), np.asarray(src, np.int64) - 1, np.asarray(dst, np.int64) - 1


def slot_args(n):
    rng = np.random.default_rng(3)
    starts = np.sort(rng.integers(1, 20 * n, n)).astype(np.int64)
    durs = rng.integers(0, 30, n).astype(np.int64)
    return 1, 25, starts, durs


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def with_backend(mod, fn):
    saved = kernels.closure_matrix, kernels.earliest_start
    kernels.closure_matrix, kernels.earliest_start = mod.closure_matrix, mod.earliest_start
    try:
        return fn()
    finally:
        kernels.closure_matrix, kernels.earliest_start = saved


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the Python kernels are available")
        return
    rows = []
    for gates in (200, 800, 2000):
        a = closure_args(gates)
        rows.append((f"closure G={gates}", best(lambda: _pykernels.closure_matrix(*a), args.repeat),
                     best(lambda: _ckernels.closure_matrix(*a), args.repeat)))
    for n in (50, 500):
        a = slot_args(n)
        rows.append((f"earliest_start n={n}", best(lambda: _pykernels.earliest_start(*a), args.repeat),
                     best(lambda: _ckernels.earliest_start(*a), args.repeat)))
    for q, depth in ((64, 6), (256, 4)):
        c, m = gen_layered(q, depth, 1), standard_grid(q)
        run = lambda: heuristic_compile(c, m, "rr")  # noqa: E731
        rows.append((f"heuristic {q}q depth {depth}",
                     best(lambda: with_backend(_pykernels, run), args.repeat),
                     best(lambda: with_backend(_ckernels, run), args.repeat)))

    print(f"{'case':28s} {'python (s)':>12s} {'cython (s)':>12s} {'speedup':>9s}")
    for name, py, cy in rows:
        print(f"{name:28s} {py:12.5f} {cy:12.5f} {py / cy:8.1f}x")


if __name__ == "__main__":
    main()
