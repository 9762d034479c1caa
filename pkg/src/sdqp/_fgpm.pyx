# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loop of the gradient-projection master solver.

Mirrors the pure-Python loop in ``fgpm.py`` step for step (projection,
nonmonotone Armijo with spectral steplength, exact quadratic updates with
periodic recomputation); kept in sync by an equivalence test.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs

cnp.import_array()


cdef double _dot(double[::1] a, double[::1] b, Py_ssize_t n):
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        s += a[i] * b[i]
    return s


cdef void _matvec(double[:, ::1] h, double[::1] x, double[::1] out,
                  Py_ssize_t n):
    cdef Py_ssize_t i, j
    cdef double s
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += h[i, j] * x[j]
        out[i] = s


cdef void _project(double[::1] y, double[::1] out, Py_ssize_t[::1] idx,
                   Py_ssize_t n):
    """Projection onto the unit simplex by iterative variable fixing."""
    cdef Py_ssize_t na = n, j, t, i
    cdef double s = 0.0, s2, tau, v
    for i in range(n):
        idx[i] = i
        s += y[i]
    tau = (s - 1.0) / na
    while True:
        j = 0
        s2 = 0.0
        for t in range(na):
            i = idx[t]
            if y[i] > tau:
                idx[j] = i
                j += 1
                s2 += y[i]
        if j == na:
            break
        na = j  # the maximum always survives a pass, so na >= 1
        tau = (s2 - 1.0) / na
    for i in range(n):
        v = y[i] - tau
        out[i] = v if v > 0.0 else 0.0


def fgpm_loop(double[:, ::1] h_mat, double[::1] h_vec, double[::1] lam0,
              double s, double rho0, double rho_min, double rho_max,
              double gamma1, double delta, Py_ssize_t m_memory, double tol,
              long max_iters, long recompute_every, int max_backtracks):
    """Run the projected-gradient iteration; returns (lam, it, code, residual).

    code: 0 = stationary, 1 = iteration limit, 2 = line search failed.
    """
    cdef Py_ssize_t n = lam0.shape[0]
    lam_arr = np.array(lam0, dtype=np.float64)
    cdef double[::1] lam = lam_arr
    cdef double[::1] g = np.empty(n)
    cdef double[::1] y = np.empty(n)
    cdef double[::1] proj = np.empty(n)
    cdef double[::1] d = np.empty(n)
    cdef double[::1] hd = np.empty(n)
    cdef Py_ssize_t[::1] idx = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t wsize = m_memory + 1
    cdef double[::1] window = np.empty(wsize)
    cdef Py_ssize_t wcount = 1, whead = 0

    cdef double f0, f_bar, gd, dhd, alpha, f_new, b_k, a_k, r, residual
    cdef double tau
    cdef Py_ssize_t i
    cdef long it = 0
    cdef int status = 1, accepted, bt
    cdef double rho = rho0

    _matvec(h_mat, lam, hd, n)
    f0 = 0.5 * _dot(lam, hd, n) + _dot(h_vec, lam, n)
    for i in range(n):
        g[i] = hd[i] + h_vec[i]
    window[0] = f0
    residual = INFINITY

    for it in range(1, max_iters + 1):
        for i in range(n):
            y[i] = lam[i] - s * g[i]
        _project(y, proj, idx, n)
        residual = 0.0
        for i in range(n):
            d[i] = proj[i] - lam[i]
            if fabs(d[i]) > residual:
                residual = fabs(d[i])
        if residual <= tol:
            status = 0
            break

        f_bar = window[0]
        for i in range(1, wcount):
            if window[i] > f_bar:
                f_bar = window[i]

        gd = _dot(g, d, n)
        _matvec(h_mat, d, hd, n)
        dhd = _dot(d, hd, n)
        alpha = rho if rho < 1.0 else 1.0
        accepted = 0
        for bt in range(max_backtracks + 1):
            f_new = f0 + alpha * gd + 0.5 * alpha * alpha * dhd
            if f_new <= f_bar + gamma1 * alpha * gd:
                accepted = 1
                break
            alpha *= delta
        b_k = alpha * alpha * dhd
        if b_k <= 0.0:
            rho = rho_max
        else:
            a_k = alpha * alpha * _dot(d, d, n)
            r = a_k / b_k
            rho = rho_max if r > rho_max else (rho_min if r < rho_min else r)
        if not accepted:
            status = 2
            break

        for i in range(n):
            lam[i] += alpha * d[i]
        if it % recompute_every == 0:
            _matvec(h_mat, lam, hd, n)
            f0 = 0.5 * _dot(lam, hd, n) + _dot(h_vec, lam, n)
            for i in range(n):
                g[i] = hd[i] + h_vec[i]
        else:
            f0 = f0 + alpha * gd + 0.5 * alpha * alpha * dhd
            for i in range(n):
                g[i] += alpha * hd[i]
        window[whead if wcount == wsize else wcount] = f0
        if wcount == wsize:
            whead = (whead + 1) % wsize
        else:
            wcount += 1

    return lam_arr, it, status, residual
