# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled risk-set sweep; same contract as ``_sweep_py.cox_sweep``.

Accumulation runs in one pass over rows sorted by descending time,
maintaining the running scalar/vector/matrix sums for the current risk
set. Events are settled when their tie block closes.
"""

from libc.math cimport exp, log, INFINITY

import numpy as np


def cox_sweep(double[::1] eta, double[:, ::1] x, const unsigned char[::1] status,
              const long[::1] risk_end, bint want_score=False, bint want_info=False):
    cdef Py_ssize_t n = eta.shape[0]
    cdef Py_ssize_t p = x.shape[1]
    cdef Py_ssize_t pos, i, j, k, block_start
    cdef double shift = -INFINITY
    cdef double s0 = 0.0, w, ll = 0.0, wx, mu_j

    score_arr = np.zeros(p) if want_score or want_info else None
    info_arr = np.zeros((p, p)) if want_info else None
    s1_arr = np.zeros(p)
    s2_arr = np.zeros((p, p)) if want_info else None
    mu_arr = np.zeros(p) if want_info else None

    cdef double[::1] s1 = s1_arr
    cdef double[::1] score = score_arr if score_arr is not None else s1_arr
    cdef double[:, ::1] s2 = s2_arr if s2_arr is not None else np.zeros((0, 0))
    cdef double[:, ::1] info = info_arr if info_arr is not None else np.zeros((0, 0))
    cdef double[::1] mu = mu_arr if mu_arr is not None else s1_arr
    cdef bint need_s1 = want_score or want_info

    for pos in range(n):
        if eta[pos] > shift:
            shift = eta[pos]

    block_start = 0
    for pos in range(n):
        w = exp(eta[pos] - shift)
        s0 += w
        if need_s1:
            for j in range(p):
                s1[j] += w * x[pos, j]
        if want_info:
            for j in range(p):
                wx = w * x[pos, j]
                for k in range(j, p):
                    s2[j, k] += wx * x[pos, k]
        if pos == risk_end[pos]:
            for i in range(block_start, pos + 1):
                if status[i]:
                    if s0 <= 0.0:
                        return _underflow(p, want_score, want_info)
                    ll += eta[i] - shift - log(s0)
                    if want_score:
                        for j in range(p):
                            score[j] += x[i, j] - s1[j] / s0
                    if want_info:
                        for j in range(p):
                            mu[j] = s1[j] / s0
                        for j in range(p):
                            mu_j = mu[j]
                            for k in range(j, p):
                                info[j, k] += s2[j, k] / s0 - mu_j * mu[k]
            block_start = pos + 1

    if want_info:
        for j in range(p):
            for k in range(j + 1, p):
                info[k, j] = info[j, k]
    return ll, (score_arr if want_score else None), info_arr


def _underflow(Py_ssize_t p, bint want_score, bint want_info):
    return (-INFINITY,
            np.full(p, np.nan) if want_score else None,
            np.full((p, p), np.nan) if want_info else None)
