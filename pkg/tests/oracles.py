"""Independent reference implementations used only as test oracles."""

import numpy as np


def assemble_bruteforce(sigma, u_factors, v_factors):
    """Entrywise triple-loop assembly of sum_r sigma_r u^r (v^r)^T."""
    n1 = len(u_factors[0])
    n2 = len(v_factors[0])
    X = np.zeros((n1, n2))
    for i in range(n1):
        for j in range(n2):
            acc = 0.0
            for r in range(len(sigma)):
                acc += sigma[r] * u_factors[r][i] * v_factors[r][j]
            X[i, j] = acc
    return X


def lasso_coordinate_descent(A, y, beta, max_sweeps=20000, tol=1e-13):
    """Coordinate descent for min ||y - Av||^2 + beta*||v||_1, run to
    convergence. The per-coordinate minimizer is soft thresholding of the
    partial residual correlation at level beta/2."""
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    m, n = A.shape
    v = np.zeros(n)
    col_sq = np.sum(A * A, axis=0)
    r = y.copy()
    for _ in range(max_sweeps):
        max_change = 0.0
        for j in range(n):
            if col_sq[j] == 0.0:
                continue
            rho = A[:, j] @ r + col_sq[j] * v[j]
            new = np.sign(rho) * max(abs(rho) - beta / 2.0, 0.0) / col_sq[j]
            if new != v[j]:
                r += A[:, j] * (v[j] - new)
                max_change = max(max_change, abs(new - v[j]))
                v[j] = new
        if max_change < tol:
            break
    return v


def lasso_objective(A, y, v, beta):
    r = y - A @ v
    return float(r @ r) + beta * float(np.abs(v).sum())


def penalty_grid_minimum(alpha, a, beta, b, lo=1e-4, hi=10.0, step=1e-4):
    """Grid search of f(lam) = lam^2*alpha*a + beta*b/lam over (0, hi]."""
    lams = np.arange(lo, hi + step, step)
    vals = lams**2 * alpha * a + beta * b / lams
    return float(vals.min())
