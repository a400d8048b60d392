# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner kernels.

Fused single-pass loops for the per-window and moving-block statistics.
``numpy_backend`` provides the same three functions; the suites assert
agreement between the two.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def group_means(double[::1] values, cnp.int64_t[::1] starts, cnp.int64_t[::1] stops):
    cdef Py_ssize_t T = starts.shape[0]
    cdef Py_ssize_t j, i
    cdef double acc
    out_arr = np.empty(T, dtype=np.float64)
    cdef double[::1] out = out_arr
    for j in range(T):
        acc = 0.0
        for i in range(starts[j], stops[j]):
            acc += values[i]
        out[j] = acc / (stops[j] - starts[j])
    return out_arr


def within_moments(
    double[:, ::1] x,
    double[::1] y,
    cnp.int64_t[::1] starts,
    cnp.int64_t[::1] stops,
):
    cdef Py_ssize_t T = starts.shape[0]
    cdef Py_ssize_t p = x.shape[1]
    cdef Py_ssize_t j, i, a, b
    cdef double n_j, ym, dy, dxa

    scatter_arr = np.zeros((p, p), dtype=np.float64)
    cross_arr = np.zeros(p, dtype=np.float64)
    xbar_arr = np.empty((T, p), dtype=np.float64)
    ybar_arr = np.empty(T, dtype=np.float64)
    xm_arr = np.empty(p, dtype=np.float64)

    cdef double[:, ::1] scatter = scatter_arr
    cdef double[::1] cross = cross_arr
    cdef double[:, ::1] xbar = xbar_arr
    cdef double[::1] ybar = ybar_arr
    cdef double[::1] xm = xm_arr

    for j in range(T):
        n_j = stops[j] - starts[j]
        for a in range(p):
            xm[a] = 0.0
        ym = 0.0
        for i in range(starts[j], stops[j]):
            ym += y[i]
            for a in range(p):
                xm[a] += x[i, a]
        ym /= n_j
        ybar[j] = ym
        for a in range(p):
            xm[a] /= n_j
            xbar[j, a] = xm[a]
        for i in range(starts[j], stops[j]):
            dy = y[i] - ym
            for a in range(p):
                dxa = x[i, a] - xm[a]
                cross[a] += dxa * dy
                for b in range(a, p):
                    scatter[a, b] += dxa * (x[i, b] - xm[b])

    # accumulated the upper triangle only
    for a in range(p):
        for b in range(a + 1, p):
            scatter[b, a] = scatter[a, b]

    return scatter_arr, cross_arr, xbar_arr, ybar_arr


def sliding_means(double[::1] values, Py_ssize_t w):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t L = n - w + 1
    cdef Py_ssize_t i, l
    cdef double acc = 0.0
    out_arr = np.empty(L, dtype=np.float64)
    cdef double[::1] out = out_arr
    for i in range(w):
        acc += values[i]
    out[0] = acc / w
    for l in range(1, L):
        acc += values[l + w - 1] - values[l - 1]
        out[l] = acc / w
    return out_arr
