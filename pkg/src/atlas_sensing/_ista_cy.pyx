# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled ISTA inner loop. Contract documented in `_ista_py.py`.

The matrix-vector products go through BLAS dgemv (same routines numpy uses),
while the thresholding, objective bookkeeping, and divergence detection stay
in C, avoiding per-iteration Python overhead.
"""

import numpy as np

cimport cython
from libc.math cimport fabs, sqrt, INFINITY
from scipy.linalg.cython_blas cimport dgemv, dcopy


def ista_loop(double[:, ::1] A, double[::1] y, double[::1] v0,
              double beta, double t, double theta, int max_iters, double tol):
    cdef int m = A.shape[0]
    cdef int n = A.shape[1]
    cdef double thr = 0.5 * t * beta
    cdef double neg_thr = theta * thr

    v_arr = np.array(v0, dtype=np.float64, copy=True)
    r_arr = np.empty(m, dtype=np.float64)
    g_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] v = v_arr
    cdef double[::1] r = r_arr
    cdef double[::1] g = g_arr

    cdef double prev_obj = INFINITY
    cdef int bad_streak = 0
    cdef int iters = 0
    cdef int j, k
    cdef double obj, z, vn, delta_sq, vnorm_sq, denom

    # the C-contiguous (m, n) buffer is an (n, m) Fortran matrix equal to A^T
    cdef int one = 1
    cdef double d_one = 1.0
    cdef double d_zero = 0.0
    cdef double d_neg_one = -1.0

    for k in range(1, max_iters + 1):
        iters = k
        # r = y - A v  (dgemv on the Fortran view: trans applies A itself)
        dcopy(&m, &y[0], &one, &r[0], &one)
        if n > 0:
            dgemv("T", &n, &m, &d_neg_one, &A[0, 0], &n, &v[0], &one,
                  &d_one, &r[0], &one)
        obj = 0.0
        for j in range(m):
            obj += r[j] * r[j]
        for j in range(n):
            obj += beta * fabs(v[j])
        if obj > prev_obj:
            bad_streak += 1
            if bad_streak >= 10:
                return v_arr, iters, True
        else:
            bad_streak = 0
        prev_obj = obj

        # g = A^T r
        dgemv("N", &n, &m, &d_one, &A[0, 0], &n, &r[0], &one,
              &d_zero, &g[0], &one)

        delta_sq = 0.0
        vnorm_sq = 0.0
        for j in range(n):
            z = v[j] + t * g[j]
            if z > thr:
                vn = z - thr
            elif z < -neg_thr:
                vn = z + neg_thr
            else:
                vn = 0.0
            delta_sq += (vn - v[j]) * (vn - v[j])
            v[j] = vn
            vnorm_sq += vn * vn

        denom = sqrt(vnorm_sq)
        if denom < 1e-30:
            denom = 1e-30
        if sqrt(delta_sq) <= tol * denom:
            break

    return v_arr, iters, False
