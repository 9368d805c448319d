# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled slot loop.  Must stay behaviourally identical to _kernel_py.run_chunk."""

import numpy as np
from libc.stdint cimport int64_t


def run_chunk(const double[:, ::1] draws, int64_t slot0,
              int64_t[::1] failures, double[::1] alpha, int64_t[::1] hol,
              double cp_max, double cp_min, int64_t[::1] counters):
    cdef Py_ssize_t n = draws.shape[0]
    cdef Py_ssize_t length = draws.shape[1]
    cdef Py_ssize_t s, i
    cdef int64_t slot, ntx, winner
    cdef unsigned char[::1] tx = np.zeros(n, dtype=np.uint8)
    cdef double floor2 = 2.0 * cp_min

    with nogil:
        for s in range(length):
            slot = slot0 + s
            ntx = 0
            winner = -1
            for i in range(n):
                if draws[i, s] < alpha[i]:
                    tx[i] = 1
                    ntx += 1
                    winner = i
                else:
                    tx[i] = 0
            counters[0] += ntx
            if ntx == 0:
                counters[4] += 1
            elif ntx == 1:
                counters[2] += 1
                counters[5] += slot - hol[winner] + 1
                counters[6] += 1
                hol[winner] = slot + 1
                failures[winner] = 0
                alpha[winner] = cp_max
            else:
                counters[3] += 1
                counters[1] += ntx
                for i in range(n):
                    if tx[i]:
                        failures[i] += 1
                        if failures[i] % 2 == 0 and alpha[i] >= floor2:
                            alpha[i] = alpha[i] * 0.5
