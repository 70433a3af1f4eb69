"""Error metrics, theoretical bound evaluators, advisory checks of the
minimizer-property lemmas, and the Monte-Carlo probe of the additive
restricted isometry constant."""

from dataclasses import dataclass, field

import numpy as np

from .measurement import MeasurementOperator
from .models import (
    GroundTruth,
    MatrixClass,
    sample_effectively_sparse_unit_vector,
    sample_sparse_unit_vector,
)

# balancing constant C_{2,1} = (1/2)^(2/3) + 2^(1/3)
C21 = 0.5 ** (2.0 / 3.0) + 2.0 ** (1.0 / 3.0)


@dataclass
class BoundParams:
    s: float
    R: int
    gamma: float = 1.0
    c: float = 1.0
    delta: float = 0.0
    c_U: float = 1.0
    noise_norm: float = 0.0
    schatten_23: float = 0.0

    def __post_init__(self):
        if min(self.s, self.gamma, self.c_U, self.noise_norm, self.schatten_23) < 0:
            raise ValueError("bound parameters must be non-negative")
        if self.c < 1:
            raise ValueError("c must be at least 1")
        if not 0 <= self.delta < 1:
            raise ValueError("delta must lie in [0, 1)")


def relative_error(X_hat, X_out):
    """Frobenius distance relative to the ground-truth norm."""
    X_hat = np.asarray(X_hat, dtype=float)
    X_out = np.asarray(X_out, dtype=float)
    denom = np.linalg.norm(X_hat)
    if denom == 0.0:
        raise ValueError("relative error undefined for zero ground truth")
    return float(np.linalg.norm(X_hat - X_out) / denom)


def success(rel_err, threshold):
    """Recovery counts as successful when rel_err <= threshold (closed)."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    return rel_err <= threshold


def misfit_bound_rhs(ground: GroundTruth, alpha, beta, noise_norm):
    """||eta||^2 + C21 * (alpha*beta^2)^(1/3) * sum_r (||u^r||_2 ||v^r||_1)^(2/3).

    Evaluated on the stored decomposition factors; the product
    ||u||_2 * ||v||_1 is gauge-invariant, so unit factors with sigma folded
    into the v-side give the canonical value.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    d = ground.decomposition
    total = 0.0
    for sig, u, v in zip(d.sigma, d.u_factors, d.v_factors):
        total += (np.linalg.norm(u) * sig * np.abs(v).sum()) ** (2.0 / 3.0)
    return float(noise_norm**2 + C21 * (alpha * beta**2) ** (1.0 / 3.0) * total)


def theorem_bound(params: BoundParams, alpha, beta):
    """Frobenius-error bound for appropriate global minimizers:
    sqrt(s^(1/3) R^(2/3) C21 c_U) * (alpha*beta^2)^(1/6) * ||X||_{2/3}^(1/3)
    + 2*||eta||_2 + sqrt(delta)."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    lead = np.sqrt(params.s ** (1.0 / 3.0) * params.R ** (2.0 / 3.0) * C21 * params.c_U)
    return float(
        lead * (alpha * beta**2) ** (1.0 / 6.0) * params.schatten_23 ** (1.0 / 3.0)
        + 2.0 * params.noise_norm
        + np.sqrt(params.delta)
    )


def corollary_bound(params: BoundParams):
    """Noise-adapted form: (2*sqrt(c_U R^(2/3) s^(1/3)) + 2)*||eta||_2
    + sqrt(delta)."""
    slope = 2.0 * np.sqrt(params.c_U * params.R ** (2.0 / 3.0) * params.s ** (1.0 / 3.0)) + 2.0
    return float(slope * params.noise_norm + np.sqrt(params.delta))


@dataclass
class BoundednessVerdict:
    applicable: bool
    misfit: float
    noise_norm: float
    u_bound_holds: bool = None
    v_bound_holds: bool = None
    product_bound_holds: bool = None

    @property
    def all_hold(self):
        if not self.applicable:
            return None
        return bool(self.u_bound_holds and self.v_bound_holds and self.product_bound_holds)

    def to_dict(self):
        return {
            "applicable": self.applicable,
            "misfit": self.misfit,
            "noise_norm": self.noise_norm,
            "u_bound_holds": self.u_bound_holds,
            "v_bound_holds": self.v_bound_holds,
            "product_bound_holds": self.product_bound_holds,
        }


def check_boundedness(ground: GroundTruth, solve, op: MeasurementOperator, y,
                      alpha, beta, noise_norm, slack=1e-9):
    """Advisory check of the minimizer-norm inequalities.

    Applies only when the solution misfit is at least the noise norm; a
    failing inequality flags a local-minimum suspect, not a bug.
    """
    y = np.asarray(y, dtype=float)
    misfit = float(np.linalg.norm(y - op.apply(solve.assembled)))
    if misfit < noise_norm:
        return BoundednessVerdict(applicable=False, misfit=misfit, noise_norm=noise_norm)

    gd = ground.decomposition
    rhs_core = sum(
        (np.linalg.norm(u) * sig * np.abs(v).sum()) ** (2.0 / 3.0)
        for sig, u, v in zip(gd.sigma, gd.u_factors, gd.v_factors)
    )
    d = solve.decomposition
    sum_u = sum(float(u @ u) for u in d.u)
    sum_v1 = sum(float(np.abs(v).sum()) for v in d.v)
    sum_prod = sum(
        (np.linalg.norm(u) * np.abs(v).sum()) ** (2.0 / 3.0) for u, v in zip(d.u, d.v)
    )
    tol = 1.0 + slack
    return BoundednessVerdict(
        applicable=True,
        misfit=misfit,
        noise_norm=noise_norm,
        u_bound_holds=bool(sum_u <= C21 * (beta**2 / alpha**2) ** (1.0 / 3.0) * rhs_core * tol),
        v_bound_holds=bool(sum_v1 <= C21 * (alpha / beta) ** (1.0 / 3.0) * rhs_core * tol),
        product_bound_holds=bool(sum_prod <= rhs_core * tol),
    )


@dataclass
class SparsityVerdict:
    component: int
    gated: bool
    ratio: float = None
    bound: float = None
    holds: bool = None

    def to_dict(self):
        return {
            "component": self.component,
            "gated": self.gated,
            "ratio": self.ratio,
            "bound": self.bound,
            "holds": self.holds,
        }


def check_sparsity_control(solve, y, beta, gamma):
    """Per-component check: components with ||v||_2 >= ||y||_2^2/gamma must
    have l1/l2 ratio below gamma/beta. Components below the gate are exempt."""
    y = np.asarray(y, dtype=float)
    gate = float(y @ y) / gamma
    out = []
    for r, v in enumerate(solve.decomposition.v):
        nv = float(np.linalg.norm(v))
        if nv < gate:
            out.append(SparsityVerdict(component=r, gated=False))
            continue
        ratio = float(np.abs(v).sum() / nv)
        bound = gamma / beta
        out.append(SparsityVerdict(component=r, gated=True, ratio=ratio, bound=bound,
                                   holds=bool(ratio < bound)))
    return out


@dataclass
class RipProbeReport:
    samples: int
    max_deviation: float
    mean_deviation: float
    matrix_class: MatrixClass
    R: int
    s1: int
    s2: int
    gamma: float

    def to_dict(self):
        return {
            "samples": self.samples,
            "max_deviation": self.max_deviation,
            "mean_deviation": self.mean_deviation,
            "matrix_class": self.matrix_class.value,
            "R": self.R,
            "s1": self.s1,
            "s2": self.s2,
            "gamma": self.gamma,
        }


def rip_probe(op: MeasurementOperator, matrix_class, R, s1, s2, gamma, samples,
              seed) -> RipProbeReport:
    """Monte-Carlo lower bound on the additive RIP constant.

    Draws `samples` matrices from the requested class with sigma scaled to
    l2-norm exactly gamma and records |  ||A(Z)||^2 - ||Z||_F^2 |. Each sample
    uses a seed derived from (seed, index), so results are independent of any
    worker layout.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    if isinstance(matrix_class, str):
        matrix_class = MatrixClass(matrix_class)
    sampler = (
        sample_sparse_unit_vector
        if matrix_class is MatrixClass.EXACT_SPARSE
        else sample_effectively_sparse_unit_vector
    )
    max_dev = 0.0
    sum_dev = 0.0
    for i in range(samples):
        rng = np.random.default_rng([int(seed), i])
        sigma = rng.uniform(0.5, 1.0, size=R)
        sigma *= gamma / np.linalg.norm(sigma)
        Z = np.zeros((op.n1, op.n2))
        for r in range(R):
            Z += sigma[r] * np.outer(sampler(op.n1, s1, rng), sampler(op.n2, s2, rng))
        dev = abs(float(np.sum(op.apply(Z) ** 2)) - float(np.sum(Z * Z)))
        sum_dev += dev
        if dev > max_dev:
            max_dev = dev
    return RipProbeReport(
        samples=samples,
        max_deviation=max_dev,
        mean_deviation=sum_dev / samples,
        matrix_class=matrix_class,
        R=R,
        s1=s1,
        s2=s2,
        gamma=gamma,
    )
