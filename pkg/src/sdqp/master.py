"""Master-problem state: the vertex basis and its reduced quadratic model.

With vertices stacked as rows of B, the master objective in barycentric
coordinates is

    f(B'lam) = 1/2 lam' H lam + h' lam,   H = 2 B Q B',  h = B c,

so H and h fully describe the master QP over the unit simplex.  Both are
maintained incrementally: adding a vertex costs one Q-vector product (cached)
plus k dot products, never a rebuild.
"""

import numpy as np

DUPLICATE_TOL = 1e-10


class DuplicateVertexError(ValueError):
    """Pricing returned a vertex already present in the basis."""


class MasterState:
    def __init__(self, inst):
        self.inst = inst
        n = inst.n
        self.b_rows = np.zeros((0, n))  # vertex i is row i
        self.qx_rows = np.zeros((0, n))  # cached Q @ vertex rows
        self.h_mat = np.zeros((0, 0))
        self.h_vec = np.zeros(0)
        self.lam = np.zeros(0)

    @property
    def k(self):
        return self.b_rows.shape[0]

    def find_vertex(self, x, tol=DUPLICATE_TOL):
        """Index of a basis vertex within tol in max-norm, or -1."""
        if self.k == 0:
            return -1
        err = np.max(np.abs(self.b_rows - np.asarray(x)[None, :]), axis=1)
        i = int(np.argmin(err))
        return i if err[i] <= tol else -1

    def add_vertex(self, x):
        """Append a vertex; weight starts at zero.  Rejects duplicates."""
        x = np.asarray(x, dtype=float).ravel()
        if self.find_vertex(x) >= 0:
            raise DuplicateVertexError("vertex already in the basis")
        qx = self.inst.Q @ x
        k = self.k
        new_h = np.zeros((k + 1, k + 1))
        new_h[:k, :k] = self.h_mat
        if k:
            cross = 2.0 * (self.b_rows @ qx)
            new_h[:k, k] = cross
            new_h[k, :k] = cross
        new_h[k, k] = 2.0 * float(x @ qx)
        self.h_mat = new_h
        self.h_vec = np.append(self.h_vec, float(self.inst.c @ x))
        self.b_rows = np.vstack([self.b_rows, x[None, :]])
        self.qx_rows = np.vstack([self.qx_rows, qx[None, :]])
        self.lam = np.append(self.lam, 0.0)
        return k

    def drop(self, keep):
        """Restrict the basis to the given indices; weights renormalized."""
        keep = np.asarray(keep)
        if keep.dtype == bool:
            keep = np.where(keep)[0]
        self.b_rows = self.b_rows[keep]
        self.qx_rows = self.qx_rows[keep]
        self.h_mat = self.h_mat[np.ix_(keep, keep)]
        self.h_vec = self.h_vec[keep]
        lam = self.lam[keep]
        total = lam.sum()
        self.lam = lam / total if total > 0 else np.full(len(keep), 1.0 / max(len(keep), 1))

    def x(self, lam=None):
        """Map barycentric weights back to the original space."""
        lam = self.lam if lam is None else lam
        return lam @ self.b_rows

    def value(self, lam=None):
        lam = self.lam if lam is None else lam
        return 0.5 * float(lam @ self.h_mat @ lam) + float(self.h_vec @ lam)

    def gradient(self, lam=None):
        lam = self.lam if lam is None else lam
        return self.h_mat @ lam + self.h_vec

    def rebuild_error(self):
        """Max deviation of the incremental H, h from a fresh rebuild."""
        h_ref = 2.0 * self.b_rows @ self.inst.Q @ self.b_rows.T
        hv_ref = self.b_rows @ self.inst.c
        err_h = float(np.max(np.abs(h_ref - self.h_mat))) if self.k else 0.0
        err_v = float(np.max(np.abs(hv_ref - self.h_vec))) if self.k else 0.0
        return max(err_h, err_v)
