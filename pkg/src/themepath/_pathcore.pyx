# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled bitmask-DP kernel for the most probable Hamiltonian path."""

import numpy as np


def dp_table_end(logw):
    """Table dp[S, i] = best log-weight of a path visiting set S and ending at i.

    Same contract and bit-identical results as the pure kernel in
    ``_pathpure``; see there for the recurrence.
    """
    arr = np.ascontiguousarray(logw, dtype=np.float64)
    cdef Py_ssize_t k = arr.shape[0]
    if arr.ndim != 2 or arr.shape[1] != k:
        raise ValueError("logw must be square")
    if k < 1 or k > 25:
        raise ValueError(f"k={k} out of range for the bitmask table")

    cdef Py_ssize_t size = (<Py_ssize_t>1) << k
    dp_arr = np.full((size, k), -np.inf, dtype=np.float64)
    cdef double[:, ::1] dp = dp_arr
    cdef double[:, ::1] w = arr
    cdef Py_ssize_t mask, prev, i, j
    cdef double best, cand

    for i in range(k):
        dp[(<Py_ssize_t>1) << i, i] = 0.0
    for mask in range(3, size):
        if mask & (mask - 1) == 0:  # singleton: base case already set
            continue
        for i in range(k):
            if not (mask >> i) & 1:
                continue
            prev = mask ^ ((<Py_ssize_t>1) << i)
            best = dp[mask, i]
            for j in range(k):
                if not (prev >> j) & 1:
                    continue
                cand = dp[prev, j] + w[j, i]
                if cand > best:
                    best = cand
            dp[mask, i] = best
    return dp_arr
