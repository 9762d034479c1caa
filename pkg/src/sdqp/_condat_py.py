"""Pure-numpy fallback for the simplex projection kernel.

Michelot-style variable fixing with whole-pass threshold updates: repeatedly
average the surviving entries and fix at zero everything at or below the
threshold.  The surviving set shrinks every pass, so the loop is finite (the
maximum always survives: tau <= max - 1/n_active < max).  The final threshold
is recomputed from the final support in one shot so the result matches the
sort-based formula up to summation order.
"""

import numpy as np


def project_simplex(y):
    y = np.asarray(y, dtype=float).ravel()
    k = y.size
    if k == 1:
        return np.ones(1)
    active = np.ones(k, dtype=bool)
    n_active = k
    tau = (y.sum() - 1.0) / k
    while True:
        keep = active & (y > tau)
        n_keep = int(np.count_nonzero(keep))
        if n_keep == n_active:
            break
        active = keep
        n_active = n_keep
        tau = (y[active].sum() - 1.0) / n_active
    return np.maximum(y - tau, 0.0)
