# cython: boundscheck=False, wraparound=False, cdivision=True
"""C ADMM iteration loop for equality-constrained l1 minimization.

Same recurrence as ``_admm_py.admm_bp_kernel``; runs without the GIL so
per-column solves scale across threads.
"""

from libc.math cimport sqrt

import numpy as np

DEF ADAPT_EVERY = 50
DEF ADAPT_RATIO = 10.0
DEF ADAPT_SCALE = 2.0


def admm_bp_kernel(const double[:, ::1] a, const double[:, ::1] proj, const double[::1] q,
                   double rho, int max_iter, double abs_tol, double rel_tol,
                   bint adapt=True):
    """See ``parcs._kernels._admm_py.admm_bp_kernel``."""
    cdef Py_ssize_t k = a.shape[0]
    cdef Py_ssize_t m = a.shape[1]
    x_arr = np.zeros(m)
    z_arr = np.zeros(m)
    cdef double[::1] x = x_arr
    cdef double[::1] z = z_arr
    cdef double[::1] u = np.zeros(m)
    cdef double[::1] v = np.empty(m)
    cdef double[::1] av = np.empty(k)
    cdef double sq = sqrt(<double> m)
    cdef double acc, t, z_new, d, thr
    cdef double r_norm = 0.0, s_norm = 0.0, x_sq, z_sq, u_sq, big
    cdef double eps_pri, eps_dual
    cdef Py_ssize_t i, j
    cdef int it, iterations = 0
    cdef bint converged = 0

    with nogil:
        for it in range(max_iter):
            thr = 1.0 / rho
            for j in range(m):
                v[j] = z[j] - u[j]
            for i in range(k):
                acc = 0.0
                for j in range(m):
                    acc += a[i, j] * v[j]
                av[i] = acc
            for j in range(m):
                acc = 0.0
                for i in range(k):
                    acc += proj[j, i] * av[i]
                x[j] = v[j] - acc + q[j]
            r_norm = 0.0
            s_norm = 0.0
            x_sq = 0.0
            z_sq = 0.0
            u_sq = 0.0
            for j in range(m):
                t = x[j] + u[j]
                if t > thr:
                    z_new = t - thr
                elif t < -thr:
                    z_new = t + thr
                else:
                    z_new = 0.0
                u[j] = t - z_new
                d = x[j] - z_new
                r_norm += d * d
                d = z_new - z[j]
                s_norm += d * d
                z[j] = z_new
                x_sq += x[j] * x[j]
                z_sq += z_new * z_new
                u_sq += u[j] * u[j]
            r_norm = sqrt(r_norm)
            s_norm = rho * sqrt(s_norm)
            iterations = it + 1
            big = x_sq if x_sq > z_sq else z_sq
            eps_pri = sq * abs_tol + rel_tol * sqrt(big)
            eps_dual = sq * abs_tol + rel_tol * rho * sqrt(u_sq)
            if r_norm <= eps_pri and s_norm <= eps_dual:
                converged = 1
                break
            if adapt and iterations % ADAPT_EVERY == 0:
                if r_norm > ADAPT_RATIO * s_norm:
                    rho *= ADAPT_SCALE
                    for j in range(m):
                        u[j] /= ADAPT_SCALE
                elif s_norm > ADAPT_RATIO * r_norm:
                    rho /= ADAPT_SCALE
                    for j in range(m):
                        u[j] *= ADAPT_SCALE

    subgrad = np.empty(m)
    cdef double[::1] g = subgrad
    for j in range(m):
        g[j] = rho * u[j]
    return x_arr, z_arr, iterations, bool(converged), r_norm, s_norm, subgrad
