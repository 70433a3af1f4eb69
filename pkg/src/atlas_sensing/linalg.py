"""Dense linear-algebra primitives: cyclic Jacobi eigendecomposition, an SVD
built on it, and power iteration for spectral norms.

These are deliberately self-contained so they can serve as an independent
route next to numpy's LAPACK-backed routines. Matrices here are at most a few
hundred rows/columns.
"""

import math

import numpy as np


def jacobi_eigh(A, tol=1e-12, max_sweeps=100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (w, V) with eigenvalues w sorted descending and eigenvectors in
    the columns of V. Sweeps stop once the off-diagonal Frobenius mass drops
    below tol relative to the full Frobenius norm.
    """
    A = np.array(A, dtype=float, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("jacobi_eigh expects a square matrix")
    n = A.shape[0]
    V = np.eye(n)
    fro = np.linalg.norm(A)
    if fro == 0.0 or n == 1:
        return np.diag(A).copy(), V

    for _ in range(max_sweeps):
        off = math.sqrt(max(float(np.sum(A * A) - np.sum(np.diag(A) ** 2)), 0.0))
        if off <= tol * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * A[:, p] - s * A[:, q]
                rot_q = s * A[:, p] + c * A[:, q]
                A[:, p], A[:, q] = rot_p, rot_q
                rot_p = c * A[p, :] - s * A[q, :]
                rot_q = s * A[p, :] + c * A[q, :]
                A[p, :], A[q, :] = rot_p, rot_q
                A[p, q] = A[q, p] = 0.0
                rot_p = c * V[:, p] - s * V[:, q]
                rot_q = s * V[:, p] + c * V[:, q]
                V[:, p], V[:, q] = rot_p, rot_q

    w = np.diag(A).copy()
    order = np.argsort(-w)
    return w[order], V[:, order]


def jacobi_svd(X, tol=1e-12):
    """Full SVD via Jacobi eigendecomposition of the smaller Gramian.

    Returns (U, s, V) with singular values descending, X ~ U @ diag(s) @ V.T.
    Singular vectors beyond the numerical rank are filled with zero columns.
    """
    X = np.asarray(X, dtype=float)
    n1, n2 = X.shape
    if n1 <= n2:
        w, U = jacobi_eigh(X @ X.T, tol=tol)
        s = np.sqrt(np.clip(w, 0.0, None))
        V = np.zeros((n2, n1))
        cutoff = tol * max(s[0], 1.0) if s.size else 0.0
        for i in range(n1):
            if s[i] > cutoff:
                V[:, i] = (X.T @ U[:, i]) / s[i]
        return U, s, V
    U2, s, V2 = jacobi_svd(X.T, tol=tol)
    return V2, s, U2


def singular_values(X, tol=1e-12):
    """Singular values (descending) via the Jacobi route."""
    X = np.asarray(X, dtype=float)
    G = X @ X.T if X.shape[0] <= X.shape[1] else X.T @ X
    w, _ = jacobi_eigh(G, tol=tol)
    return np.sqrt(np.clip(w, 0.0, None))


def spectral_norm(A, iters=20, tol=1e-8):
    """Largest singular value of A by power iteration on A^T A.

    Runs at most `iters` iterations, stopping early when the Rayleigh
    estimate changes by less than tol relatively. Deterministic start vector.
    """
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    if m == 0 or n == 0:
        return 0.0
    # index ramp avoids a start vector orthogonal to the top singular space
    v = 1.0 + np.arange(n, dtype=float) / max(n, 1)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = A.T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        new_est = math.sqrt(nw)
        v = w / nw
        if est > 0.0 and abs(new_est - est) <= tol * est:
            est = new_est
            break
        est = new_est
    return est
