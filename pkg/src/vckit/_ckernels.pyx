# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: windowed-sinc resampler taps and overlap-add.

Signatures match vckit.kernels._numpy exactly; the backend is chosen at
import time in vckit.kernels.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, floor

cnp.import_array()


def overlap_add(const double[:, ::1] frames, int hop, int out_len):
    """Sum frame rows into an output buffer at offsets of hop samples."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.zeros(out_len, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t t, i, start
    cdef Py_ssize_t n_frames = frames.shape[0]
    cdef Py_ssize_t n = frames.shape[1]
    for t in range(n_frames):
        start = t * hop
        for i in range(n):
            out[start + i] += frames[t, i]
    return out_arr


def resample_taps(const double[::1] xpad, const double[::1] table, int n_out,
                  double ratio, double half_width, int phases, int pad):
    """Windowed-sinc interpolation of n_out samples at positions m*ratio.

    xpad is the input padded with `pad` zeros on both sides; `table` holds
    the right half of the symmetric kernel sampled every 1/phases input
    samples, with at least two trailing zeros for safe interpolation.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(n_out, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t m, n, n0, n1, idx
    cdef Py_ssize_t last = table.shape[0] - 2
    cdef double center, dist, frac, w, acc
    for m in range(n_out):
        center = m * ratio
        n0 = <Py_ssize_t>ceil(center - half_width)
        n1 = <Py_ssize_t>floor(center + half_width)
        acc = 0.0
        for n in range(n0, n1 + 1):
            dist = center - n
            if dist < 0.0:
                dist = -dist
            dist = dist * phases
            idx = <Py_ssize_t>dist
            if idx > last:
                idx = last
            frac = dist - idx
            w = table[idx] * (1.0 - frac) + table[idx + 1] * frac
            acc += xpad[n + pad] * w
        out[m] = acc
    return out_arr
