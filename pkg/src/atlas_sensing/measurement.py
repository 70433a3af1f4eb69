"""Subgaussian measurement operators: forward map, adjoint, and the two
partial linearizations used by the alternating solver.

The i-th measurement is (1/sqrt(m)) <A_i, X>_F; the design matrix stores
vec(A_i) (row-major) in its rows, unscaled.
"""

import enum
from dataclasses import dataclass

import numpy as np


class Ensemble(enum.Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"


@dataclass
class NoisySample:
    y: np.ndarray
    noise: np.ndarray
    noise_norm: float


class MeasurementOperator:
    """m linear measurements of an n1 x n2 matrix, scaled by 1/sqrt(m)."""

    def __init__(self, design, n1, n2):
        design = np.asarray(design, dtype=float)
        if design.ndim != 2 or design.shape[1] != n1 * n2:
            raise ValueError("design must be m x (n1*n2)")
        if design.shape[0] < 1:
            raise ValueError("need at least one measurement")
        if not np.all(np.isfinite(design)):
            raise ValueError("design contains non-finite entries")
        self.design = design
        self.m = design.shape[0]
        self.n1 = n1
        self.n2 = n2
        self.scale = 1.0 / np.sqrt(self.m)
        # m x n1 x n2 view for the partial contractions
        self._tensor = design.reshape(self.m, n1, n2)

    def apply(self, X):
        """(1/sqrt(m)) (<A_i, X>_F)_i."""
        X = np.asarray(X, dtype=float)
        if X.shape != (self.n1, self.n2):
            raise ValueError(f"expected shape {(self.n1, self.n2)}, got {X.shape}")
        return self.scale * (self.design @ X.ravel())

    def adjoint(self, y):
        """(1/sqrt(m)) sum_i y_i A_i."""
        y = np.asarray(y, dtype=float)
        if y.shape != (self.m,):
            raise ValueError(f"expected length {self.m}, got {y.shape}")
        return self.scale * (self.design.T @ y).reshape(self.n1, self.n2)

    def partial_in_u(self, v):
        """Matrix M with M @ u == apply(u v^T) for every u."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n2,):
            raise ValueError(f"expected length {self.n2}, got {v.shape}")
        return self.scale * (self._tensor @ v)

    def partial_in_v(self, u):
        """Matrix M with M @ v == apply(u v^T) for every v."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n1,):
            raise ValueError(f"expected length {self.n1}, got {u.shape}")
        return self.scale * np.tensordot(self._tensor, u, axes=(1, 0))


def sample_operator(m, n1, n2, ensemble=Ensemble.GAUSSIAN, rng=None):
    """Draw an operator with i.i.d. mean-0 variance-1 entries."""
    if min(m, n1, n2) < 1:
        raise ValueError("m, n1, n2 must be positive")
    if isinstance(ensemble, str):
        ensemble = Ensemble(ensemble)
    if rng is None:
        rng = np.random.default_rng()
    if ensemble is Ensemble.GAUSSIAN:
        design = rng.standard_normal((m, n1 * n2))
    else:
        design = rng.integers(0, 2, size=(m, n1 * n2)).astype(float) * 2.0 - 1.0
    return MeasurementOperator(design, n1, n2)


def add_noise(clean, noise_to_signal, signal_frobenius, rng):
    """Gaussian noise rescaled so its l2-norm is exactly
    noise_to_signal * signal_frobenius."""
    clean = np.asarray(clean, dtype=float)
    if signal_frobenius <= 0:
        raise ValueError("signal_frobenius must be positive")
    if noise_to_signal < 0:
        raise ValueError("noise_to_signal must be non-negative")
    target = noise_to_signal * signal_frobenius
    if target == 0.0:
        noise = np.zeros_like(clean)
    else:
        noise = rng.standard_normal(clean.shape)
        noise *= target / np.linalg.norm(noise)
    return NoisySample(y=clean + noise, noise=noise, noise_norm=float(np.linalg.norm(noise)))
