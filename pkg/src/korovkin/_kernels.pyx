# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.  Must stay signature-compatible with _kernels_py."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow

cnp.import_array()


def sliding_extrema(const double[::1] values, Py_ssize_t window):
    """Max and min of ``values[i:i + window + 1]`` for every full window.

    van Herk / Gil-Werman: running extrema inside blocks of ``window + 1``
    samples, forwards and backwards, combined pairwise; O(N), branch-free.
    """
    cdef Py_ssize_t n = values.shape[0]
    if window < 0 or window >= n:
        raise ValueError("window must satisfy 0 <= window < len(values)")
    cdef Py_ssize_t span = window + 1
    cdef Py_ssize_t m = n - window
    out_max = np.empty(m, dtype=np.float64)
    out_min = np.empty(m, dtype=np.float64)
    cdef double[::1] omax = out_max
    cdef double[::1] omin = out_min
    # fwd: extrema from the block start to j; bwd: from j to the block end
    cdef double[::1] fmax = np.empty(n, dtype=np.float64)
    cdef double[::1] fmin = np.empty(n, dtype=np.float64)
    cdef double[::1] bmax = np.empty(n, dtype=np.float64)
    cdef double[::1] bmin = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t j, i, lo, hi
    cdef double v, run_max, run_min
    for lo in range(0, n, span):
        hi = lo + span if lo + span < n else n
        run_max = values[lo]
        run_min = run_max
        for j in range(lo, hi):
            v = values[j]
            if v > run_max:
                run_max = v
            if v < run_min:
                run_min = v
            fmax[j] = run_max
            fmin[j] = run_min
        run_max = values[hi - 1]
        run_min = run_max
        for j in range(hi - 1, lo - 1, -1):
            v = values[j]
            if v > run_max:
                run_max = v
            if v < run_min:
                run_min = v
            bmax[j] = run_max
            bmin[j] = run_min
    for i in range(m):
        j = i + window
        omax[i] = max(bmax[i], fmax[j])
        omin[i] = min(bmin[i], fmin[j])
    return out_max, out_min


def interval_power_sup(const double[::1] prefix, double cell_width,
                       double len_exponent, double root):
    """max over 0 <= i < j <= N of ((j-i)h)**len_exponent * (S_j - S_i)**root."""
    cdef Py_ssize_t n = prefix.shape[0] - 1
    cdef Py_ssize_t i, j, d, bi = 0, bj = 1
    cdef double best = -1.0, diff, dmax, val
    cdef Py_ssize_t arg
    for d in range(1, n + 1):
        dmax = -1.0
        arg = 0
        for i in range(0, n - d + 1):
            diff = prefix[i + d] - prefix[i]
            if diff > dmax:
                dmax = diff
                arg = i
        if dmax < 0.0:
            dmax = 0.0
        val = pow(d * cell_width, len_exponent) * pow(dmax, root)
        if val > best:
            best = val
            bi = arg
            bj = arg + d
    return best, bi, bj


def muckenhoupt_sup(const double[::1] prefix_w, const double[::1] prefix_dual,
                    double cell_width, double p):
    """max over grid intervals of avg(w) * avg(w**(-1/(p-1)))**(p-1)."""
    cdef Py_ssize_t n = prefix_w.shape[0] - 1
    cdef Py_ssize_t i, d, bi = 0, bj = 1
    cdef double best = -1.0, inv, aw, ad, val
    cdef double q = p - 1.0
    cdef bint square = q == 1.0
    for d in range(1, n + 1):
        inv = 1.0 / (d * cell_width)
        for i in range(0, n - d + 1):
            aw = (prefix_w[i + d] - prefix_w[i]) * inv
            ad = (prefix_dual[i + d] - prefix_dual[i]) * inv
            if ad < 0.0:
                ad = 0.0
            val = aw * ad if square else aw * pow(ad, q)
            if val > best:
                best = val
                bi = i
                bj = i + d
    return best, bi, bj
