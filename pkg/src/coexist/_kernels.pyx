# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Mirrors ``_kernels_py`` operation for operation."""
import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, fabs, M_PI

cnp.import_array()


def rk4_hill(const double[::1] a_nodes, const double[::1] a_mid, double h):
    cdef Py_ssize_t n = a_mid.shape[0]
    cdef Py_ssize_t i, col
    cdef double a0, am, a1, z, w
    cdef double k1z, k1w, k2z, k2w, k3z, k3w, k4z, k4w
    out_arr = np.empty((n + 1, 4), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    out[0, 0] = 1.0
    out[0, 1] = 0.0
    out[0, 2] = 0.0
    out[0, 3] = 1.0
    for col in range(0, 4, 2):
        z = out[0, col]
        w = out[0, col + 1]
        for i in range(n):
            a0 = a_nodes[i]
            am = a_mid[i]
            a1 = a_nodes[i + 1]
            k1z = w
            k1w = -a0 * z
            k2z = w + 0.5 * h * k1w
            k2w = -am * (z + 0.5 * h * k1z)
            k3z = w + 0.5 * h * k2w
            k3w = -am * (z + 0.5 * h * k2z)
            k4z = w + h * k3w
            k4w = -a1 * (z + h * k3z)
            z = z + (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
            w = w + (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
            out[i + 1, col] = z
            out[i + 1, col + 1] = w
    return out_arr


def winding_sum(const double[::1] fx, const double[::1] fy):
    cdef Py_ssize_t n = fx.shape[0]
    cdef Py_ssize_t i
    cdef double prev, cur, d, total = 0.0, worst = 0.0
    prev = atan2(fy[n - 1], fx[n - 1])
    for i in range(n):
        cur = atan2(fy[i], fx[i])
        d = cur - prev
        if d > M_PI:
            d -= 2.0 * M_PI
        elif d <= -M_PI:
            d += 2.0 * M_PI
        total += d
        if fabs(d) > worst:
            worst = fabs(d)
        prev = cur
    return total, worst
