# cython: language_level=3
"""Compiled inner loop for harmonic sums over price-jump events.

Computes S_k = sum_j jumps[j] * exp(i k times[j]) for k = 1..K without
transcendental calls inside the k loop: each event carries a unit rotor
exp(i t_j) advanced by one complex multiply per harmonic, renormalized
every RENORM_EVERY steps to keep |rotor| within 1e-12 of 1.  Events are
processed in L1-sized blocks; block partial sums enter the per-harmonic
accumulators through Kahan compensation so the tiny imaginary parts that
carry lead-lag information survive long sums.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

DEF BLOCK = 1024
DEF RENORM_EVERY = 1024


def harmonic_jump_sums(const double[::1] times, const double[::1] jumps, Py_ssize_t n_harmonics):
    """Return complex sums S_k = sum_j jumps[j]*exp(1j*k*times[j]), k=1..K."""
    cdef Py_ssize_t n = times.shape[0]
    cdef Py_ssize_t K = n_harmonics
    if jumps.shape[0] != n:
        raise ValueError("times and jumps must have equal length")
    if K < 0:
        raise ValueError("harmonic count must be non-negative")

    out_r = np.zeros(K, dtype=np.float64)
    out_i = np.zeros(K, dtype=np.float64)
    comp_r = np.zeros(K, dtype=np.float64)
    comp_i = np.zeros(K, dtype=np.float64)
    # per-block rotor state and inputs, reused across blocks
    scratch = np.empty((5, BLOCK), dtype=np.float64)

    cdef double[::1] cr = out_r
    cdef double[::1] ci = out_i
    cdef double[::1] kr = comp_r
    cdef double[::1] ki = comp_i
    cdef double[:, ::1] sc = scratch

    if K == 0 or n == 0:
        return out_r + 1j * out_i

    with nogil:
        _accumulate_blocks(times, jumps, n, K, cr, ci, kr, ki, sc)

    return out_r + 1j * out_i


cdef void _accumulate_blocks(const double[::1] t, const double[::1] dp, Py_ssize_t n,
                             Py_ssize_t K, double[::1] cr, double[::1] ci,
                             double[::1] kr, double[::1] ki,
                             double[:, ::1] sc) noexcept nogil:
    cdef Py_ssize_t start, nb, j, k, m
    cdef double *wr = &sc[0, 0]
    cdef double *wi = &sc[1, 0]
    cdef double *zr = &sc[2, 0]
    cdef double *zi = &sc[3, 0]
    cdef double *dj = &sc[4, 0]
    cdef double a0, a1, a2, a3, b0, b1, b2, b3
    cdef double xr, xi, sr, si, y, tt, inv

    for start in range(0, n, BLOCK):
        nb = n - start
        if nb > BLOCK:
            nb = BLOCK
        for j in range(nb):
            wr[j] = cos(t[start + j])
            wi[j] = sin(t[start + j])
            zr[j] = 1.0
            zi[j] = 0.0
            dj[j] = dp[start + j]

        for k in range(1, K + 1):
            # rotate rotors to harmonic k and dot against the jumps;
            # four accumulator pairs break the reduction dependency chain
            a0 = a1 = a2 = a3 = 0.0
            b0 = b1 = b2 = b3 = 0.0
            m = 0
            while m + 4 <= nb:
                xr = zr[m] * wr[m] - zi[m] * wi[m]
                xi = zr[m] * wi[m] + zi[m] * wr[m]
                zr[m] = xr
                zi[m] = xi
                a0 += dj[m] * xr
                b0 += dj[m] * xi
                xr = zr[m + 1] * wr[m + 1] - zi[m + 1] * wi[m + 1]
                xi = zr[m + 1] * wi[m + 1] + zi[m + 1] * wr[m + 1]
                zr[m + 1] = xr
                zi[m + 1] = xi
                a1 += dj[m + 1] * xr
                b1 += dj[m + 1] * xi
                xr = zr[m + 2] * wr[m + 2] - zi[m + 2] * wi[m + 2]
                xi = zr[m + 2] * wi[m + 2] + zi[m + 2] * wr[m + 2]
                zr[m + 2] = xr
                zi[m + 2] = xi
                a2 += dj[m + 2] * xr
                b2 += dj[m + 2] * xi
                xr = zr[m + 3] * wr[m + 3] - zi[m + 3] * wi[m + 3]
                xi = zr[m + 3] * wi[m + 3] + zi[m + 3] * wr[m + 3]
                zr[m + 3] = xr
                zi[m + 3] = xi
                a3 += dj[m + 3] * xr
                b3 += dj[m + 3] * xi
                m += 4
            while m < nb:
                xr = zr[m] * wr[m] - zi[m] * wi[m]
                xi = zr[m] * wi[m] + zi[m] * wr[m]
                zr[m] = xr
                zi[m] = xi
                a0 += dj[m] * xr
                b0 += dj[m] * xi
                m += 1
            sr = (a0 + a1) + (a2 + a3)
            si = (b0 + b1) + (b2 + b3)

            # Kahan-compensated add of the block partial into harmonic k
            y = sr - kr[k - 1]
            tt = cr[k - 1] + y
            kr[k - 1] = (tt - cr[k - 1]) - y
            cr[k - 1] = tt
            y = si - ki[k - 1]
            tt = ci[k - 1] + y
            ki[k - 1] = (tt - ci[k - 1]) - y
            ci[k - 1] = tt

            if k % RENORM_EVERY == 0:
                for m in range(nb):
                    inv = 1.0 / sqrt(zr[m] * zr[m] + zi[m] * zi[m])
                    zr[m] *= inv
                    zi[m] *= inv
