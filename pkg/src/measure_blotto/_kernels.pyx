# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled winner-take-all kernels over step profiles on a shared grid.

Inner loops run over contiguous pieces and are branch-free so the compiler
can vectorize them; random bids make branchy comparisons mispredict.
"""
import numpy as np


def grid_utilities(const double[:, :, ::1] values, const double[::1] masses):
    """Utilities for ``n`` profiles of ``k`` bids on ``m`` common pieces.

    ``values[d, i, j]`` is player ``i``'s bid on piece ``j`` in draw ``d``.
    Each piece's mass goes to the highest bidders, split evenly on exact ties.
    """
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t k = values.shape[1]
    cdef Py_ssize_t m = values.shape[2]
    if masses.shape[0] != m:
        raise ValueError("masses must have one entry per piece")
    out = np.zeros((n, k), dtype=np.float64)
    if n == 0 or k == 0 or m == 0:
        return out
    buf = np.empty(3 * m, dtype=np.float64)
    cdef double[:, ::1] u = out
    cdef double[::1] b = buf
    cdef double* top = &b[0]
    cdef double* cnt = &b[m]
    cdef double* who = &b[2 * m]
    cdef const double* w = &masses[0]
    cdef const double* row
    cdef Py_ssize_t d, i, j
    cdef double v, share
    with nogil:
        for d in range(n):
            row = &values[d, 0, 0]
            for j in range(m):
                top[j] = row[j]
                cnt[j] = 0.0
                who[j] = 0.0
            for i in range(1, k):
                row = &values[d, i, 0]
                for j in range(m):
                    v = row[j]
                    top[j] = v if v > top[j] else top[j]
            # tie counts, and the sum of tied indices (the winner when unique)
            for i in range(k):
                row = &values[d, i, 0]
                for j in range(m):
                    v = 1.0 if row[j] == top[j] else 0.0
                    cnt[j] += v
                    who[j] += v * i
            for j in range(m):
                if cnt[j] == 1.0:
                    u[d, <Py_ssize_t>who[j]] += w[j]
                else:
                    share = w[j] / cnt[j]
                    for i in range(k):
                        if values[d, i, j] == top[j]:
                            u[d, i] += share
    return out


def deviator_utility(const double[::1] psi, const double[:, :, ::1] opponents, const double[::1] masses):
    """Utility of one fixed bid ``psi`` against ``n`` draws of opponent bids."""
    cdef Py_ssize_t n = opponents.shape[0]
    cdef Py_ssize_t k = opponents.shape[1]
    cdef Py_ssize_t m = opponents.shape[2]
    if psi.shape[0] != m or masses.shape[0] != m:
        raise ValueError("psi and masses must have one entry per piece")
    out = np.zeros(n, dtype=np.float64)
    if n == 0 or k == 0 or m == 0:
        return out
    buf = np.empty(2 * m, dtype=np.float64)
    cdef double[::1] u = out
    cdef double[::1] b = buf
    cdef double* top = &b[0]
    cdef double* cnt = &b[m]
    cdef const double* w = &masses[0]
    cdef const double* p = &psi[0]
    cdef const double* row
    cdef Py_ssize_t d, i, j
    cdef double v, acc
    with nogil:
        for d in range(n):
            row = &opponents[d, 0, 0]
            for j in range(m):
                top[j] = row[j]
                cnt[j] = 0.0
            for i in range(1, k):
                row = &opponents[d, i, 0]
                for j in range(m):
                    v = row[j]
                    top[j] = v if v > top[j] else top[j]
            for i in range(k):
                row = &opponents[d, i, 0]
                for j in range(m):
                    cnt[j] += 1.0 if row[j] == top[j] else 0.0
            acc = 0.0
            for j in range(m):
                acc += w[j] * ((1.0 if p[j] > top[j] else 0.0) + (1.0 if p[j] == top[j] else 0.0) / (cnt[j] + 1.0))
            u[d] = acc
    return out
