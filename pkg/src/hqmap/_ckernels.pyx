# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``hqmap._pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def lag_oscillation(const double complex[::1] v, bint periodic, Py_ssize_t m0, Py_ssize_t m1):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t m, i, last, k
    cdef double best, dr, di, d2
    out = np.zeros(m1 - m0, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for m in range(m0, m1):
            best = 0.0
            if periodic:
                last = n
            else:
                last = n - m
            for i in range(last):
                k = i + m
                if k >= n:
                    k = k - n
                dr = v[k].real - v[i].real
                di = v[k].imag - v[i].imag
                d2 = dr * dr + di * di
                if d2 > best:
                    best = d2
            o[m - m0] = sqrt(best)
    return out


def chord_arc_lags(const double complex[::1] p, Py_ssize_t m0, Py_ssize_t m1):
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t m, i, k, arg
    cdef double c2, best_inv, minc2
    ratio = np.zeros(m1 - m0, dtype=np.float64)
    argi = np.zeros(m1 - m0, dtype=np.int64)
    chord = np.zeros(m1 - m0, dtype=np.float64)
    cdef double[::1] r = ratio
    cdef long long[::1] a = argi
    cdef double[::1] c = chord
    cdef double dr, di
    with nogil:
        for m in range(m0, m1):
            minc2 = 1e300
            arg = 0
            for i in range(n):
                k = i + m
                if k >= n:
                    k = k - n
                dr = p[k].real - p[i].real
                di = p[k].imag - p[i].imag
                c2 = dr * dr + di * di
                if c2 < minc2:
                    minc2 = c2
                    arg = i
            c[m - m0] = sqrt(minc2)
            a[m - m0] = arg
            if minc2 > 0.0:
                r[m - m0] = 1.0 / sqrt(minc2)
            else:
                r[m - m0] = 1e300
    return ratio, argi, chord


def odd_difference_sum(const double complex[::1] v, const long long[::1] offsets,
                       const double[::1] weights, Py_ssize_t j0, Py_ssize_t j1):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t nk = offsets.shape[0]
    cdef Py_ssize_t j, k, ip, im
    cdef double sr, si, w
    out = np.zeros(j1 - j0, dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        for j in range(j0, j1):
            sr = 0.0
            si = 0.0
            for k in range(nk):
                ip = (j + offsets[k]) % n
                im = (j - offsets[k]) % n
                if im < 0:
                    im = im + n
                w = weights[k]
                sr = sr + w * (v[ip].real - v[im].real)
                si = si + w * (v[ip].imag - v[im].imag)
            o[j - j0] = sr + 1j * si
    return out


def jacobian_sum(const double complex[::1] v, const double complex[::1] d,
                 const long long[::1] offsets, const double[::1] weights,
                 Py_ssize_t j0, Py_ssize_t j1):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t nk = offsets.shape[0]
    cdef Py_ssize_t j, k, ip
    cdef double s, ar, ai, cr, ci
    out = np.zeros(j1 - j0, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for j in range(j0, j1):
            # i * Psi'(tau)
            cr = -d[j].imag
            ci = d[j].real
            s = 0.0
            for k in range(nk):
                ip = (j + offsets[k]) % n
                if ip < 0:
                    ip = ip + n
                ar = v[ip].real - v[j].real
                ai = v[ip].imag - v[j].imag
                s = s + weights[k] * (ar * cr + ai * ci)
            o[j - j0] = s
    return out
