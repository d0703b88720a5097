# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dirichlet-polynomial kernels.

Both routines evaluate sum_j c_j exp(-s L_j) where L_j is the (possibly
complex) logarithm of the j-th base.  Work is split over output points so
every point is reduced in the same order regardless of thread count.
"""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport exp, cos, sin

cnp.import_array()

DEF LINE_BLOCK = 256


def dirichlet_points(const double complex[::1] c, const double complex[::1] logb,
                     const double complex[::1] s, int nthreads=1):
    cdef Py_ssize_t n = c.shape[0], m = s.shape[0]
    cdef Py_ssize_t i, j
    cdef double x, y, a, b, mag, ph, re, im
    out = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] o = out
    if n == 0 or m == 0:
        return out
    for i in prange(m, nogil=True, num_threads=max(nthreads, 1), schedule="static"):
        x = s[i].real
        y = s[i].imag
        re = 0.0
        im = 0.0
        for j in range(n):
            a = logb[j].real
            b = logb[j].imag
            mag = exp(-(x * a - y * b))
            ph = -(x * b + y * a)
            re = re + mag * (c[j].real * cos(ph) - c[j].imag * sin(ph))
            im = im + mag * (c[j].real * sin(ph) + c[j].imag * cos(ph))
        o[i] = re + 1j * im
    return out


def dirichlet_line(const double complex[::1] c, const double complex[::1] logb,
                   double x, double y0, double dy, Py_ssize_t ny, int nthreads=1):
    """Values at x + i(y0 + k dy), k < ny, by per-term phase rotation.

    The rotation is restarted from an exact exponential at the start of
    each block of LINE_BLOCK points, which bounds rounding growth.
    """
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t nblocks = (ny + LINE_BLOCK - 1) // LINE_BLOCK
    cdef Py_ssize_t blk, j, k, k0, k1
    cdef double a, b, yb, mag, ph, vr, vi, rr, ri, tr, rmag, rph
    out_re = np.zeros(ny, dtype=np.float64)
    out_im = np.zeros(ny, dtype=np.float64)
    cdef double[::1] ore = out_re
    cdef double[::1] oim = out_im
    if n == 0 or ny == 0:
        return out_re + 1j * out_im
    for blk in prange(nblocks, nogil=True, num_threads=max(nthreads, 1), schedule="static"):
        k0 = blk * LINE_BLOCK
        k1 = k0 + LINE_BLOCK
        if k1 > ny:
            k1 = ny
        yb = y0 + k0 * dy
        for j in range(n):
            a = logb[j].real
            b = logb[j].imag
            mag = exp(-(x * a - yb * b))
            ph = -(x * b + yb * a)
            vr = mag * (c[j].real * cos(ph) - c[j].imag * sin(ph))
            vi = mag * (c[j].real * sin(ph) + c[j].imag * cos(ph))
            rmag = exp(dy * b)
            rph = -dy * a
            rr = rmag * cos(rph)
            ri = rmag * sin(rph)
            for k in range(k0, k1):
                ore[k] += vr
                oim[k] += vi
                tr = vr * rr - vi * ri
                vi = vr * ri + vi * rr
                vr = tr
    return out_re + 1j * out_im
