"""Structured matrix classes: exactly sparse and effectively sparse rank-R
decompositions, their samplers, and scalar characteristics (effective
sparsity, Schatten quasi-norms, Gramian constants)."""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .linalg import jacobi_eigh, singular_values


class MatrixClass(enum.Enum):
    EXACT_SPARSE = "exact"
    EFFECTIVELY_SPARSE = "effective"


class SingularModelError(ValueError):
    """Raised when a factor Gramian is numerically rank-deficient."""


@dataclass
class SparseDecomposition:
    """Rank-R decomposition sum_r sigma_r u^r (v^r)^T with unit-norm factors."""

    u_factors: list
    v_factors: list
    sigma: np.ndarray

    def __post_init__(self):
        self.u_factors = [np.asarray(u, dtype=float) for u in self.u_factors]
        self.v_factors = [np.asarray(v, dtype=float) for v in self.v_factors]
        self.sigma = np.asarray(self.sigma, dtype=float)
        R = len(self.u_factors)
        if R < 1 or len(self.v_factors) != R or self.sigma.shape != (R,):
            raise ValueError("inconsistent factor counts")
        if np.any(self.sigma < 0):
            raise ValueError("sigma entries must be non-negative")
        for w in self.u_factors + self.v_factors:
            nw = np.linalg.norm(w)
            # zero placeholder factors (sigma 0) are tolerated
            if nw > 0 and abs(nw - 1.0) > 1e-12 * max(1.0, nw):
                raise ValueError("factors must have unit Euclidean norm")

    @property
    def rank(self):
        return len(self.u_factors)


@dataclass
class GroundTruthSpec:
    """Sampling recipe for a planted matrix."""

    n1: int
    n2: int
    R: int
    matrix_class: MatrixClass = MatrixClass.EXACT_SPARSE
    s1: int = None
    s2: int = None
    gamma_cap: float = None
    common_support: bool = False
    orthonormalize: bool = False
    target_frobenius: float = 1.0

    def __post_init__(self):
        if self.s1 is None:
            self.s1 = self.n1
        if self.s2 is None:
            self.s2 = self.n2
        if isinstance(self.matrix_class, str):
            self.matrix_class = MatrixClass(self.matrix_class)
        if min(self.n1, self.n2, self.R) < 1:
            raise ValueError("dimensions and rank must be positive")
        if not (1 <= self.s1 <= self.n1 and 1 <= self.s2 <= self.n2):
            raise ValueError("sparsity levels must lie in [1, n]")
        if self.target_frobenius <= 0:
            raise ValueError("target_frobenius must be positive")
        if self.gamma_cap is not None and self.gamma_cap < 1.0:
            raise ValueError("gamma_cap must be at least 1")
        if self.orthonormalize:
            if not self.common_support:
                raise ValueError(
                    "orthonormalization requires a common support; with arbitrary "
                    "supports it would densify the factors"
                )
            if self.s2 < self.R:
                raise ValueError("orthonormalization needs s2 >= R on the shared support")
            if self.matrix_class is not MatrixClass.EXACT_SPARSE:
                raise ValueError(
                    "orthonormalization is only supported for exactly sparse factors"
                )

    def to_dict(self):
        return {
            "n1": self.n1,
            "n2": self.n2,
            "R": self.R,
            "matrix_class": self.matrix_class.value,
            "s1": self.s1,
            "s2": self.s2,
            "gamma_cap": self.gamma_cap,
            "common_support": self.common_support,
            "orthonormalize": self.orthonormalize,
            "target_frobenius": self.target_frobenius,
        }


@dataclass
class GroundTruth:
    decomposition: SparseDecomposition
    matrix: np.ndarray
    spec: GroundTruthSpec


def sample_sparse_unit_vector(n, s, rng, support=None):
    """Unit vector with exactly s non-zero i.i.d. Gaussian entries.

    The support is drawn uniformly unless one is supplied.
    """
    if not 1 <= s <= n:
        raise ValueError(f"sparsity s={s} must lie in [1, {n}]")
    if support is None:
        support = rng.choice(n, size=s, replace=False)
    v = np.zeros(n)
    vals = rng.standard_normal(s)
    while np.linalg.norm(vals) == 0.0:  # pragma: no cover - measure-zero event
        vals = rng.standard_normal(s)
    v[support] = vals / np.linalg.norm(vals)
    return v


# relative l2 mass of the dense tail added to the sparse core
_TAIL_MASS = 0.2


def sample_effectively_sparse_unit_vector(n, s, rng, support=None):
    """Unit vector with l1-norm at most sqrt(s): sparse core plus dense tail.

    A dense Gaussian tail of relative l2-mass 0.2 is added to an s-sparse
    core; the sum is renormalized and rejected if it leaves the l1 budget.
    The tail mass is halved after repeated rejections so the sampler always
    terminates (an s-sparse vector itself satisfies the budget).
    """
    if not 1 <= s <= n:
        raise ValueError(f"sparsity s={s} must lie in [1, {n}]")
    budget = math.sqrt(s)
    tail_mass = _TAIL_MASS
    while True:
        for _ in range(32):
            core = sample_sparse_unit_vector(n, s, rng, support=support)
            tail = rng.standard_normal(n)
            tail *= tail_mass / np.linalg.norm(tail)
            v = core + tail
            v /= np.linalg.norm(v)
            if np.abs(v).sum() <= budget:
                return v
        tail_mass /= 2.0


def assemble_matrix(d: SparseDecomposition):
    """Assemble sum_r sigma_r u^r (v^r)^T."""
    n1 = d.u_factors[0].shape[0]
    n2 = d.v_factors[0].shape[0]
    X = np.zeros((n1, n2))
    for sig, u, v in zip(d.sigma, d.u_factors, d.v_factors):
        if u.shape != (n1,) or v.shape != (n2,):
            raise ValueError("mismatched factor lengths")
        X += sig * np.outer(u, v)
    return X


def sample_ground_truth(spec: GroundTruthSpec, rng) -> GroundTruth:
    """Draw a planted matrix according to the recipe in `spec`.

    sigma is drawn i.i.d. uniform on [0.5, 1] and globally rescaled so the
    assembled matrix hits target_frobenius exactly.
    """
    u_support = rng.choice(spec.n1, size=spec.s1, replace=False) if spec.common_support else None
    v_support = rng.choice(spec.n2, size=spec.s2, replace=False) if spec.common_support else None

    if spec.matrix_class is MatrixClass.EXACT_SPARSE:
        sampler = sample_sparse_unit_vector
    else:
        sampler = sample_effectively_sparse_unit_vector

    u_factors = [sampler(spec.n1, spec.s1, rng, support=u_support) for _ in range(spec.R)]
    v_factors = [sampler(spec.n2, spec.s2, rng, support=v_support) for _ in range(spec.R)]

    if spec.orthonormalize:
        v_factors = _gram_schmidt_on_support(v_factors, v_support, rng, spec)

    sigma = rng.uniform(0.5, 1.0, size=spec.R)
    d = SparseDecomposition(u_factors, v_factors, sigma)
    X = assemble_matrix(d)
    nrm = np.linalg.norm(X)
    if nrm == 0.0:  # pragma: no cover - sigma >= 0.5 rules this out
        raise ValueError("degenerate sample with zero Frobenius norm")
    scale = spec.target_frobenius / nrm
    sigma = sigma * scale
    if spec.gamma_cap is not None and np.linalg.norm(sigma) > spec.gamma_cap * (1 + 1e-12):
        raise ValueError(
            f"rescaled sigma norm {np.linalg.norm(sigma):.6g} exceeds gamma_cap "
            f"{spec.gamma_cap:.6g}; raise the cap or lower target_frobenius"
        )
    d = SparseDecomposition(u_factors, v_factors, sigma)
    return GroundTruth(decomposition=d, matrix=X * scale, spec=spec)


def _gram_schmidt_on_support(v_factors, support, rng, spec):
    """Orthonormalize the v-factors restricted to their shared support."""
    sub = np.stack([v[support] for v in v_factors], axis=1)  # s2 x R
    out = []
    basis = []
    for r in range(sub.shape[1]):
        w = sub[:, r].copy()
        for b in basis:
            w -= (b @ w) * b
        nw = np.linalg.norm(w)
        while nw < 1e-10:  # resample a collinear draw instead of failing
            w = rng.standard_normal(len(support))
            for b in basis:
                w -= (b @ w) * b
            nw = np.linalg.norm(w)
        w /= nw
        basis.append(w)
        full = np.zeros(spec.n2)
        full[support] = w
        out.append(full)
    return out


def effective_sparsity_ratio(v):
    """l1 over l2 norm; squares to the effective sparsity level."""
    v = np.asarray(v, dtype=float)
    n2 = np.linalg.norm(v)
    if n2 == 0.0:
        raise ValueError("effective sparsity ratio undefined for the zero vector")
    return float(np.abs(v).sum() / n2)


def schatten_quasi_norm(X, p):
    """(sum_i sigma_i(X)^p)^(1/p) over the singular values of X.

    Singular values come from the cyclic-Jacobi eigen-route on the smaller
    Gramian side.
    """
    if p <= 0:
        raise ValueError("Schatten exponent must be positive")
    s = singular_values(X)
    # the Gramian route squares the condition number, so values below
    # sqrt(eps) relative to the largest are numerical noise, not rank
    if s.size and s[0] > 0:
        s = s[s > s[0] * np.sqrt(np.finfo(float).eps) * max(X.shape)]
    else:
        s = s[s > 0]
    if s.size == 0:
        return 0.0
    # scale out the largest value for numerical stability of small p
    top = s[0]
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def gramian_constants(u_factors):
    """Constants (c_U, C_U) = (1/lambda_min, lambda_max) of the normalized
    factor Gramian."""
    U = np.stack([np.asarray(u, dtype=float) for u in u_factors], axis=1)
    norms = np.linalg.norm(U, axis=0)
    if np.any(norms == 0):
        raise SingularModelError("zero factor in Gramian")
    U = U / norms
    G = U.T @ U
    w, _ = jacobi_eigh(G)
    lam_min, lam_max = float(w[-1]), float(w[0])
    if lam_min < 1e-10:
        raise SingularModelError(
            f"factor Gramian is numerically singular (lambda_min={lam_min:.3e})"
        )
    return 1.0 / lam_min, lam_max
