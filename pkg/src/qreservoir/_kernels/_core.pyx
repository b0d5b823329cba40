# cython: language_level=3
"""Compiled hot kernels.

Same contract as ``_numpy``: batch product-state synthesis, probability
extraction, per-row z-scoring and the percolation pair scan.  Loops are
OpenMP-parallel over rows and allocation-free inside; the big matrix
multiply of the evolution step stays in BLAS either way and is not
duplicated here.
"""

import numpy as np

cimport cython
from cython.parallel cimport prange
from libc.math cimport cos, sin, sqrt, fabs, hypot

BACKEND = "compiled"


@cython.boundscheck(False)
@cython.wraparound(False)
def product_states(thetas, phis):
    """Batch of little-endian product states from per-qubit Bloch angles."""
    cdef double[:, ::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef double[:, ::1] ph = np.ascontiguousarray(phis, dtype=np.float64)
    cdef Py_ssize_t batch = th.shape[0]
    cdef Py_ssize_t n = th.shape[1]
    cdef Py_ssize_t dim = 1 << n
    out_arr = np.empty((batch, dim), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t b, l, i, size
    cdef double half, phase
    cdef double complex amp0, amp1
    for b in prange(batch, nogil=True, schedule="static"):
        out[b, 0] = 1.0
        size = 1
        for l in range(n):
            half = 0.5 * th[b, l]
            phase = ph[b, l]
            amp0 = cos(half)
            amp1 = (cos(phase) + 1j * sin(phase)) * sin(half)
            for i in range(size):
                out[b, i + size] = out[b, i] * amp1
                out[b, i] = out[b, i] * amp0
            size = size * 2
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def probabilities(states):
    """|amplitude|^2 row-wise without intermediate temporaries."""
    cdef double complex[:, ::1] s = np.ascontiguousarray(states, dtype=np.complex128)
    cdef Py_ssize_t batch = s.shape[0]
    cdef Py_ssize_t dim = s.shape[1]
    out_arr = np.empty((batch, dim), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t b, i
    cdef double re, im
    for b in prange(batch, nogil=True, schedule="static"):
        for i in range(dim):
            re = s[b, i].real
            im = s[b, i].imag
            out[b, i] = re * re + im * im
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def standardize_rows(p, double degenerate_tol=1e-15):
    """Population z-score per row; constant rows map to zeros."""
    cdef double[:, ::1] x = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t batch = x.shape[0]
    cdef Py_ssize_t dim = x.shape[1]
    out_arr = np.empty((batch, dim), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t b, i
    cdef double mean, var, std, d
    for b in prange(batch, nogil=True, schedule="static"):
        mean = 0.0
        for i in range(dim):
            mean = mean + x[b, i]
        mean = mean / dim
        var = 0.0
        for i in range(dim):
            d = x[b, i] - mean
            var = var + d * d
        std = sqrt(var / dim)
        if std < degenerate_tol:
            for i in range(dim):
                out[b, i] = 0.0
        else:
            for i in range(dim):
                out[b, i] = (x[b, i] - mean) / std
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def percolation_edges(energies, hmat, double weight_floor=1e-12):
    """All pairs i < j with |E_j - E_i| < |H_ij| and |H_ij| > floor.

    Two passes: a parallel count per row, a prefix sum for row offsets,
    then a parallel fill; the output is (i, j) sorted by construction.
    """
    cdef double[::1] e = np.ascontiguousarray(energies, dtype=np.float64)
    cdef double complex[:, ::1] h = np.ascontiguousarray(hmat, dtype=np.complex128)
    cdef Py_ssize_t dim = e.shape[0]
    counts_arr = np.zeros(dim, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef Py_ssize_t i, j
    cdef double w, de
    for i in prange(dim, nogil=True, schedule="dynamic"):
        for j in range(i + 1, dim):
            w = hypot(h[i, j].real, h[i, j].imag)
            if w > weight_floor and fabs(e[j] - e[i]) < w:
                counts[i] += 1
    offsets_arr = np.zeros(dim + 1, dtype=np.int64)
    np.cumsum(counts_arr, out=offsets_arr[1:])
    cdef long long[::1] offsets = offsets_arr
    cdef Py_ssize_t total = offsets_arr[dim]
    out_i_arr = np.empty(total, dtype=np.int64)
    out_j_arr = np.empty(total, dtype=np.int64)
    out_w_arr = np.empty(total, dtype=np.float64)
    cdef long long[::1] out_i = out_i_arr
    cdef long long[::1] out_j = out_j_arr
    cdef double[::1] out_w = out_w_arr
    cdef Py_ssize_t pos
    for i in prange(dim, nogil=True, schedule="dynamic"):
        pos = offsets[i]
        for j in range(i + 1, dim):
            w = hypot(h[i, j].real, h[i, j].imag)
            if w > weight_floor and fabs(e[j] - e[i]) < w:
                out_i[pos] = i
                out_j[pos] = j
                out_w[pos] = w
                pos = pos + 1
    return out_i_arr, out_j_arr, out_w_arr
