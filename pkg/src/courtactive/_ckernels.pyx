# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled run-length and counting kernels. Mirrors ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def run_spans(const unsigned char[::1] cond, const long long[::1] t, long long period):
    cdef Py_ssize_t n = cond.shape[0]
    cdef Py_ssize_t i, m = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] starts = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ends = np.empty(n, dtype=np.int64)
    cdef long long[::1] s = starts
    cdef long long[::1] e = ends
    cdef bint open_run = False
    with nogil:
        for i in range(n):
            if cond[i]:
                if open_run and t[i] - t[i - 1] <= period:
                    e[m - 1] = i
                else:
                    s[m] = i
                    e[m] = i
                    m += 1
                    open_run = True
            else:
                open_run = False
    return starts[:m].copy(), ends[:m].copy()


def mark_long_runs(const unsigned char[::1] cond, const long long[::1] t,
                   long long period, long long min_duration):
    cdef Py_ssize_t n = cond.shape[0]
    cdef Py_ssize_t i, j, start = 0
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef bint open_run = False
    with nogil:
        for i in range(n + 1):
            if i < n and cond[i] and open_run and t[i] - t[i - 1] <= period:
                continue
            if open_run and t[i - 1] - t[start] + period >= min_duration:
                for j in range(start, i):
                    o[j] = 1
            if i < n and cond[i]:
                start = i
                open_run = True
            else:
                open_run = False
    return out


def fill_spans(Py_ssize_t n, const long long[::1] starts, const long long[::1] ends):
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t k, j
    with nogil:
        for k in range(starts.shape[0]):
            for j in range(starts[k], ends[k] + 1):
                o[j] = 1
    return out


def assign_ord(const signed char[::1] codes, signed char transition):
    cdef Py_ssize_t n = codes.shape[0]
    cdef Py_ssize_t i
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    cdef long long current = 1
    with nogil:
        for i in range(n):
            if i > 0 and codes[i - 1] == transition and codes[i] != transition:
                current += 1
            o[i] = current
    return out
