# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot inner loops (see pykernels for contracts)."""

import numpy as np

cimport cython
from libc.stdlib cimport free, malloc

BACKEND = "cython"


def frac_conv(conv_weights, boundary_weights, data):
    c_arr = np.ascontiguousarray(conv_weights, dtype=np.complex128)
    f_arr = np.ascontiguousarray(data, dtype=np.complex128)
    cdef double complex[::1] d = np.ascontiguousarray(boundary_weights, dtype=np.complex128)
    cdef Py_ssize_t n = f_arr.shape[0]
    # split planes; the weight planes are reversed once so the inner loop
    # walks both operands forward (keeps the loop vectorizable)
    cdef double[::1] cr = np.ascontiguousarray(c_arr.real[::-1])
    cdef double[::1] ci = np.ascontiguousarray(c_arr.imag[::-1])
    cdef double[::1] fr = np.ascontiguousarray(f_arr.real)
    cdef double[::1] fi = np.ascontiguousarray(f_arr.imag)
    out_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t i, j, base
    cdef double acc_r, acc_i, w_r, w_i
    with nogil:
        for i in range(n):
            base = n - 1 - i  # cr[base + j] == c[i - j]
            acc_r = 0.0
            acc_i = 0.0
            for j in range(i + 1):
                w_r = cr[base + j]
                w_i = ci[base + j]
                acc_r += w_r * fr[j] - w_i * fi[j]
                acc_i += w_r * fi[j] + w_i * fr[j]
            out[i] = (acc_r + d[i].real * fr[0] - d[i].imag * fi[0]) \
                + 1j * (acc_i + d[i].real * fi[0] + d[i].imag * fr[0])
    return out_arr


def rk4_companion(coeffs_ascending, u, double h, int substeps):
    cdef double[::1] a = np.ascontiguousarray(coeffs_ascending, dtype=np.float64)
    cdef double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t nsamp = uu.shape[0]
    q_arr = np.empty(nsamp, dtype=np.float64)
    cdef double[::1] q = q_arr
    cdef double hh = h / substeps
    cdef double max_norm = 0.0
    cdef double u0, du, ua, um, ub, acc, v
    cdef Py_ssize_t i, j, k
    cdef double *z = <double *> malloc(6 * n * sizeof(double))
    if z == NULL:
        raise MemoryError()
    cdef double *k1 = z + n
    cdef double *k2 = z + 2 * n
    cdef double *k3 = z + 3 * n
    cdef double *k4 = z + 4 * n
    cdef double *zt = z + 5 * n
    try:
        with nogil:
            for k in range(n):
                z[k] = 0.0
            q[0] = 0.0
            for i in range(nsamp - 1):
                u0 = uu[i]
                du = uu[i + 1] - u0
                for j in range(substeps):
                    ua = u0 + du * (j / <double> substeps)
                    um = u0 + du * ((j + 0.5) / <double> substeps)
                    ub = u0 + du * ((j + 1.0) / <double> substeps)
                    _deriv(a, z, ua, k1, n)
                    for k in range(n):
                        zt[k] = z[k] + 0.5 * hh * k1[k]
                    _deriv(a, zt, um, k2, n)
                    for k in range(n):
                        zt[k] = z[k] + 0.5 * hh * k2[k]
                    _deriv(a, zt, um, k3, n)
                    for k in range(n):
                        zt[k] = z[k] + hh * k3[k]
                    _deriv(a, zt, ub, k4, n)
                    for k in range(n):
                        z[k] = z[k] + (hh / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k])
                        v = z[k] if z[k] >= 0.0 else -z[k]
                        if v > max_norm:
                            max_norm = v
                q[i + 1] = z[0]
    finally:
        free(z)
    return q_arr, max_norm


cdef inline void _deriv(double[::1] a, double *z, double uval, double *dz, Py_ssize_t n) nogil:
    cdef Py_ssize_t k
    cdef double acc = 0.0
    for k in range(n - 1):
        dz[k] = z[k + 1]
    for k in range(n):
        acc += a[k] * z[k]
    dz[n - 1] = uval - acc
