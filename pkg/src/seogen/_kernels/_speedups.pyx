# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: beam-step candidate scoring and LCS length.

Contracts mirror _pyfallback.py exactly; both backends must return
bit-identical float64 results.
"""

from libc.math cimport exp as c_exp, pow as c_pow

import numpy as np


cdef inline double _theta(double length, double r) nogil:
    if length < r:
        return length
    return 2.0 * r - length


def theta(double length, double r):
    return _theta(length, r)


def length_penalty(double length, double r, double alpha):
    cdef double base = 5.0 + _theta(length, r) + 1.0
    if base <= 0.0:
        raise ValueError(
            f"length penalty undefined for length={length}, r={r}: "
            f"5 + theta + 1 = {base} is not positive (requires length < 2*r + 6)"
        )
    return c_pow(base, alpha) / c_pow(6.0, alpha)


def rank_penalty(double rank, double match_pos, double beta, double position_scale):
    return 1.0 + c_exp(-rank - match_pos / position_scale + beta)


def score_candidates(double[:, ::1] cand_log_probs, double[:, ::1] rp_eff, double lp):
    cdef Py_ssize_t n_beams = cand_log_probs.shape[0]
    cdef Py_ssize_t n_vocab = cand_log_probs.shape[1]
    out_arr = np.empty((n_beams, n_vocab), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t b, v
    with nogil:
        for b in range(n_beams):
            for v in range(n_vocab):
                out[b, v] = cand_log_probs[b, v] / (lp * rp_eff[b, v])
    return out_arr


def lcs_length(a, b):
    cdef long long[::1] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef long long[::1] bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t m = av.shape[0]
    cdef Py_ssize_t n = bv.shape[0]
    if m == 0 or n == 0:
        return 0
    row_arr = np.zeros(n + 1, dtype=np.int64)
    cdef long long[::1] row = row_arr
    cdef Py_ssize_t i, j
    cdef long long prev, cur, ai
    with nogil:
        for i in range(m):
            prev = 0
            ai = av[i]
            for j in range(n):
                cur = row[j + 1]
                if ai == bv[j]:
                    row[j + 1] = prev + 1
                elif row[j] > cur:
                    row[j + 1] = row[j]
                prev = cur
    return int(row_arr[n])
