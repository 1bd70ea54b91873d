# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same signatures and semantics as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def sequence_u11(areas, a, b, phi):
    cdef double[:, ::1] ar = np.ascontiguousarray(areas, dtype=np.float64)
    cdef double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[:, ::1] ph = np.ascontiguousarray(phi, dtype=np.float64)
    cdef Py_ssize_t n = ar.shape[0]
    cdef Py_ssize_t p = ar.shape[1]

    out_v = np.empty(n, dtype=np.complex128)
    out_a = np.empty(n, dtype=np.complex128)
    out_b = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] ov = out_v
    cdef double complex[::1] oa = out_a
    cdef double complex[::1] ob = out_b

    cdef Py_ssize_t i, k
    cdef double half, ak, bk, c, s, ca, sa, cb, sb
    cdef double complex ep, em, v0, v1, v2, n0, n1, n2, x0, x1, y0, y1, t
    cdef double complex I = 1j

    with nogil:
        for i in range(n):
            v0 = 1.0
            v1 = 0.0
            v2 = 0.0
            x0 = 1.0
            x1 = 0.0
            y0 = 1.0
            y1 = 0.0
            for k in range(p):
                half = 0.5 * ar[i, k]
                ak = av[i, k]
                bk = bv[i, k]
                ep = cos(ph[i, k]) + I * sin(ph[i, k])
                em = cos(ph[i, k]) - I * sin(ph[i, k])

                c = cos(half)
                s = sin(half)
                n0 = c * v0 + I * s * ep * (ak * v1 + bk * v2)
                n1 = I * s * em * ak * v0 + (ak * ak * c + bk * bk) * v1 + ak * bk * (c - 1.0) * v2
                n2 = I * s * em * bk * v0 + ak * bk * (c - 1.0) * v1 + (bk * bk * c + ak * ak) * v2
                v0 = n0
                v1 = n1
                v2 = n2

                ca = cos(ak * half)
                sa = sin(ak * half)
                t = ca * x0 + I * sa * ep * x1
                x1 = I * sa * em * x0 + ca * x1
                x0 = t

                cb = cos(bk * half)
                sb = sin(bk * half)
                t = cb * y0 + I * sb * ep * y1
                y1 = I * sb * em * y0 + cb * y1
                y0 = t
            ov[i] = v0
            oa[i] = x0
            ob[i] = y0
    return out_v, out_a, out_b


cdef inline void _apply(double complex[:, ::1] g, double complex* u, double complex* out,
                        int d, double w) noexcept nogil:
    # out = w * g @ u  (d x d, row-major)
    cdef int r, c, q
    cdef double complex acc
    for r in range(d):
        for c in range(d):
            acc = 0.0
            for q in range(d):
                acc = acc + g[r, q] * u[q * d + c]
            out[r * d + c] = w * acc


def rk4_evolve(coupling, omega, double dt):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] m = np.ascontiguousarray(coupling, dtype=np.complex128)
    cdef int d = m.shape[0]
    if d > 3:
        raise ValueError("rk4_evolve supports blocks of dimension <= 3")
    cdef double[::1] w = np.ascontiguousarray(omega, dtype=np.float64)
    cdef Py_ssize_t steps = (w.shape[0] - 1) // 2
    cdef double complex[:, ::1] g = 0.5j * m

    cdef double complex u[9]
    cdef double complex tmp[9]
    cdef double complex k1[9]
    cdef double complex k2[9]
    cdef double complex k3[9]
    cdef double complex k4[9]
    cdef int r, n2 = d * d
    cdef Py_ssize_t j
    cdef double w0, wh, w1

    for r in range(n2):
        u[r] = 0.0
    for r in range(d):
        u[r * d + r] = 1.0

    with nogil:
        for j in range(steps):
            w0 = w[2 * j]
            wh = w[2 * j + 1]
            w1 = w[2 * j + 2]
            _apply(g, u, k1, d, w0)
            for r in range(n2):
                tmp[r] = u[r] + 0.5 * dt * k1[r]
            _apply(g, tmp, k2, d, wh)
            for r in range(n2):
                tmp[r] = u[r] + 0.5 * dt * k2[r]
            _apply(g, tmp, k3, d, wh)
            for r in range(n2):
                tmp[r] = u[r] + dt * k3[r]
            _apply(g, tmp, k4, d, w1)
            for r in range(n2):
                u[r] = u[r] + (dt / 6.0) * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r])

    out = np.empty((d, d), dtype=np.complex128)
    for r in range(n2):
        out[r // d, r % d] = u[r]
    return out
