# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counterparts of :mod:`routeprobe.kernels._pykernels`."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def classify_points(lons, lats, bounds):
    cdef const double[::1] xs = np.ascontiguousarray(lons, dtype=np.float64)
    cdef const double[::1] ys = np.ascontiguousarray(lats, dtype=np.float64)
    cdef const double[:, ::1] b = np.ascontiguousarray(bounds, dtype=np.float64).reshape(-1, 4)
    cdef Py_ssize_t n = xs.shape[0], k = b.shape[0], i, j
    out_arr = np.empty(n, dtype=np.int32)
    cdef int[::1] out = out_arr
    cdef double x, y
    cdef int cls
    with nogil:
        for i in range(n):
            x = xs[i]
            y = ys[i]
            cls = <int>k
            for j in range(k):
                if b[j, 0] < x and x < b[j, 1] and b[j, 2] < y and y < b[j, 3]:
                    cls = <int>j
                    break
            out[i] = cls
    return out_arr


def run_table(table, classes, int start):
    cdef const int[:, ::1] t = np.ascontiguousarray(table, dtype=np.int32)
    cdef const int[::1] c = np.ascontiguousarray(classes, dtype=np.int32)
    cdef Py_ssize_t n = c.shape[0], i
    out_arr = np.empty(n, dtype=np.int32)
    cdef int[::1] out = out_arr
    cdef int state = start
    with nogil:
        for i in range(n):
            state = t[state, c[i]]
            out[i] = state
    return out_arr
