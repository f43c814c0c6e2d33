# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled inner loops for dependency closure and slot search.

Contracts are identical to :mod:`nisq_smtc._pykernels`.
"""
import numpy as np


def closure_matrix(Py_ssize_t n, const long long[::1] src, const long long[::1] dst):
    """Warshall over rows packed into 64-bit words."""
    cdef Py_ssize_t words = (n + 63) // 64
    cdef Py_ssize_t i, k, w, e, kw
    cdef unsigned long long kbit
    packed = np.zeros((n, max(words, 1)), dtype=np.uint64)
    cdef unsigned long long[:, ::1] rows = packed
    for e in range(src.shape[0]):
        rows[src[e], dst[e] >> 6] |= (<unsigned long long>1) << (dst[e] & 63)
    for k in range(n):
        kw = k >> 6
        kbit = (<unsigned long long>1) << (k & 63)
        for i in range(n):
            if rows[i, kw] & kbit:
                for w in range(words):
                    rows[i, w] |= rows[k, w]
    bits = np.unpackbits(packed.view(np.uint8), axis=1, bitorder="little")
    return np.ascontiguousarray(bits[:, :n])


def earliest_start(long long ready, long long dur,
                   const long long[::1] starts, const long long[::1] durs):
    cdef long long t = ready
    cdef Py_ssize_t k, m = starts.shape[0]
    cdef bint moved = True
    while moved:
        moved = False
        for k in range(m):
            # closed-interval overlap: neither strictly after the other
            if not (t > starts[k] + durs[k] or starts[k] > t + dur):
                t = starts[k] + durs[k] + 1
                moved = True
    return t
