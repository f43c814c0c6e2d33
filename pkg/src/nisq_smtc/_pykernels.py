"""Pure-Python versions of the hot loops.

Used when the compiled extension is unavailable, or when
``NISQ_SMTC_PURE=1`` is set.
"""
from __future__ import annotations

import numpy as np


def closure_matrix(n, src, dst):
    """Warshall reachability over ``n`` nodes with rows packed into ints.

    Returns an ``(n, n)`` uint8 matrix with ``[i, j] == 1`` iff a path of
    length >= 1 leads from ``i`` to ``j``.
    """
    rows = [0] * n
    for a, b in zip(src, dst):
        rows[int(a)] |= 1 << int(b)
    for k in range(n):
        bit = 1 << k
        row_k = rows[k]
        if not row_k:
            continue
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= row_k
    out = np.zeros((n, n), dtype=np.uint8)
    for i, r in enumerate(rows):
        j = 0
        while r:
            if r & 1:
                out[i, j] = 1
            r >>= 1
            j += 1
    return out


def earliest_start(ready, dur, starts, durs):
    """Smallest ``t >= ready`` whose closed interval ``[t, t+dur]`` is
    disjoint from every ``[starts[k], starts[k]+durs[k]]``."""
    t = int(ready)
    pairs = [(int(s), int(d)) for s, d in zip(starts, durs)]
    moved = True
    while moved:
        moved = False
        for s, d in pairs:
            if not (t > s + d or s > t + dur):
                t = s + d + 1
                moved = True
    return t
