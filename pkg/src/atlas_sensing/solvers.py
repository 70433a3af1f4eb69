"""Inner convex solvers: closed-form Tikhonov update, ISTA for the
l1-penalized least-squares step, and the (asymmetric) soft-thresholding
operators.

The l1 objective convention is ||y - Av||^2 + beta*||v||_1 (no 1/2 on the
data term), so the proximal dead zone at step scale t is t*beta/2. The ISTA
inner loop runs in a compiled kernel when available; set the environment
variable ATLAS_SENSING_NO_EXT=1 before import to force the numpy fallback.
"""

import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import spectral_norm

if os.environ.get("ATLAS_SENSING_NO_EXT"):
    from . import _ista_py as _kernel

    KERNEL_BACKEND = "python"
else:
    try:
        from . import _ista_cy as _kernel

        KERNEL_BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build environment
        from . import _ista_py as _kernel

        KERNEL_BACKEND = "python"


class StepSizeError(RuntimeError):
    """ISTA diverged under the paper-literal unit step; use SafeStep."""


@dataclass
class IstaConfig:
    max_iters: int = 500
    tol: float = 1e-8
    step_policy: str = "safe"  # "safe" (1/L) or "unit" (paper-literal)

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.step_policy not in ("safe", "unit"):
            raise ValueError(f"unknown step_policy {self.step_policy!r}")


def soft_threshold(z, beta):
    """Componentwise soft thresholding with dead zone [-beta/2, beta/2]."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    z = np.asarray(z, dtype=float)
    half = beta / 2.0
    return np.where(z > half, z - half, np.where(z < -half, z + half, 0.0))


def asym_soft_threshold(z, beta, theta):
    """Asymmetric variant: dead zone [-theta*beta/2, beta/2], shift
    theta*beta/2 on the negative branch. theta == 1 recovers soft_threshold."""
    if beta < 0 or theta < 0:
        raise ValueError("beta and theta must be non-negative")
    z = np.asarray(z, dtype=float)
    half = beta / 2.0
    return np.where(z > half, z - half, np.where(z < -theta * half, z + theta * half, 0.0))


def tikhonov_solve(design, y, alpha, prox_weight=0.0, prox_center=None):
    """Solve (alpha*I + A^T A) u = A^T y via Cholesky on the normal equations.

    With prox_weight w > 0 and a center c the system becomes
    ((alpha + w) I + A^T A) u = A^T y + w c, the exact reformulation of adding
    w*||u - c||^2 to the objective.
    """
    A = np.asarray(design, dtype=float)
    y = np.asarray(y, dtype=float)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite inputs")
    n = A.shape[1]
    G = A.T @ A + (alpha + prox_weight) * np.eye(n)
    rhs = A.T @ y
    if prox_weight > 0.0:
        rhs = rhs + prox_weight * np.asarray(prox_center, dtype=float)
    c, low = scipy.linalg.cho_factor(G)
    return scipy.linalg.cho_solve((c, low), rhs)


def ista(design, y, v0, beta, cfg: IstaConfig = None, theta=1.0):
    """Approximate argmin_v ||y - Av||^2 + beta*||v||_1 by proximal gradient.

    Under the default SafeStep policy the step scale is t = 1/L with
    L = ||A||_{2->2}^2 from power iteration, which makes every iteration the
    exact proximal-gradient map (threshold t*beta). theta != 1 switches the
    shrinkage to the asymmetric non-negativity-promoting operator.
    """
    if cfg is None:
        cfg = IstaConfig()
    A = np.ascontiguousarray(design, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    v0 = np.ascontiguousarray(v0, dtype=float)
    if beta <= 0:
        raise ValueError("beta must be positive")
    if A.shape[0] != y.shape[0] or A.shape[1] != v0.shape[0]:
        raise ValueError("inconsistent shapes")

    if cfg.step_policy == "safe":
        L = spectral_norm(A) ** 2
        if L <= 1e-30:
            # zero design: the objective reduces to const + beta*||v||_1
            return np.zeros_like(v0)
        t = 1.0 / L
    else:
        t = 1.0

    v, _, diverged = _kernel.ista_loop(A, y, v0, beta, t, theta, cfg.max_iters, cfg.tol)
    if diverged:
        raise StepSizeError(
            "ISTA objective increased on 10 consecutive iterations under the "
            "unit step; rerun with step_policy='safe'"
        )
    return np.asarray(v)
