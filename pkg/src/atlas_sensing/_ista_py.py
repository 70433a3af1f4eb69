"""Pure-numpy ISTA inner loop; fallback when the compiled kernel is absent.

Same contract as the Cython kernel in `_ista_cy.pyx`:

    ista_loop(A, y, v0, beta, t, theta, max_iters, tol) -> (v, iters, diverged)

One iteration is v <- S[v + t * A^T (y - A v)] where S is the (asymmetric)
soft-thresholding operator with dead zone t*beta/2 (theta widens the negative
branch; theta == 1 is the symmetric operator). `diverged` flips when the
objective ||y - Av||^2 + beta*||v||_1 increased on 10 consecutive iterations.
"""

import numpy as np


def ista_loop(A, y, v0, beta, t, theta, max_iters, tol):
    v = np.array(v0, dtype=float, copy=True)
    thr = 0.5 * t * beta
    prev_obj = np.inf
    bad_streak = 0
    iters = 0
    for iters in range(1, max_iters + 1):
        r = y - A @ v
        obj = float(r @ r) + beta * float(np.abs(v).sum())
        if obj > prev_obj:
            bad_streak += 1
            if bad_streak >= 10:
                return v, iters, True
        else:
            bad_streak = 0
        prev_obj = obj
        z = v + t * (A.T @ r)
        v_new = np.where(z > thr, z - thr, np.where(z < -theta * thr, z + theta * thr, 0.0))
        delta = float(np.linalg.norm(v_new - v))
        v = v_new
        if delta <= tol * max(float(np.linalg.norm(v)), 1e-30):
            break
    return v, iters, False
