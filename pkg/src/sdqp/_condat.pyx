# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex-projection kernel.

Gauss-Seidel-like variant of Michelot's variable fixing: a single scan keeps
a candidate support and a running threshold that is updated after every
element read, a second scan re-examines the set-aside elements, and final
cleanup passes remove below-threshold survivors.  The threshold is recomputed
exactly from the surviving support at each cleanup pass, which removes the
incremental-update drift and makes the output agree with the sort-based
formula up to summation order.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def project_simplex(y):
    """Euclidean projection of y onto {x : x >= 0, sum x = 1}."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = np.ascontiguousarray(y, dtype=np.float64).ravel()
    cdef Py_ssize_t n = ya.shape[0]
    out = np.empty(n, dtype=np.float64)
    if n == 1:
        out[0] = 1.0
        return out
    cdef double[::1] yv = ya
    cdef double[::1] ov = out
    cdef cnp.ndarray[cnp.intp_t, ndim=1] vbuf = np.empty(n, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] wbuf = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] v = vbuf
    cdef Py_ssize_t[::1] w = wbuf
    cdef Py_ssize_t nv = 1, nw = 0
    cdef Py_ssize_t i, j, k
    cdef double yi, rho, s
    cdef bint changed

    # first scan: grow the candidate support, resetting when the running
    # threshold falls behind the new element
    v[0] = 0
    rho = yv[0] - 1.0
    for i in range(1, n):
        yi = yv[i]
        if yi > rho:
            rho = rho + (yi - rho) / (nv + 1)
            if rho > yi - 1.0:
                v[nv] = i
                nv += 1
            else:
                for j in range(nv):
                    w[nw + j] = v[j]
                nw += nv
                v[0] = i
                nv = 1
                rho = yi - 1.0

    # second scan: re-admit set-aside elements that beat the threshold
    for j in range(nw):
        i = w[j]
        yi = yv[i]
        if yi > rho:
            v[nv] = i
            nv += 1
            rho = rho + (yi - rho) / nv

    # cleanup passes with exact threshold recomputation
    changed = True
    while changed:
        s = 0.0
        for j in range(nv):
            s += yv[v[j]]
        rho = (s - 1.0) / nv
        changed = False
        k = 0
        for j in range(nv):
            i = v[j]
            if yv[i] > rho:
                v[k] = i
                k += 1
            else:
                changed = True
        nv = k

    for i in range(n):
        yi = yv[i] - rho
        ov[i] = yi if yi > 0.0 else 0.0
    return out
