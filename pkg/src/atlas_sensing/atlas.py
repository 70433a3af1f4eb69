"""Outer alternating-minimization driver: objective evaluation, SVD-based
initialization, the plain alternating loop, the proximal (PAM) variant, and
the balancing rescaling along the scale gauge."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import jacobi_svd
from .measurement import MeasurementOperator
from .models import SparseDecomposition
from .solvers import IstaConfig, ista, tikhonov_solve


class DivergenceError(RuntimeError):
    """The outer iteration produced a non-finite objective."""


@dataclass
class Decomposition:
    """Unnormalized factor tuple (u^1..u^R, v^1..v^R); scale lives in the
    factors."""

    u: list
    v: list

    def __post_init__(self):
        self.u = [np.asarray(x, dtype=float) for x in self.u]
        self.v = [np.asarray(x, dtype=float) for x in self.v]
        if len(self.u) != len(self.v) or not self.u:
            raise ValueError("need matching non-empty factor lists")
        for x in self.u + self.v:
            if not np.all(np.isfinite(x)):
                raise ValueError("non-finite factor entries")

    @property
    def rank(self):
        return len(self.u)

    def assemble(self):
        X = np.outer(self.u[0], self.v[0])
        for u, v in zip(self.u[1:], self.v[1:]):
            X += np.outer(u, v)
        return X

    def copy(self):
        return Decomposition([x.copy() for x in self.u], [x.copy() for x in self.v])


@dataclass
class ProximalConfig:
    """Per-step quadratic proximal weights (the PAM variant). Both must lie
    in a positive interval bounded away from 0 and infinity."""

    lam: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if self.lam <= 0 or self.mu <= 0:
            raise ValueError("proximal parameters must be positive")


@dataclass
class SolverConfig:
    alpha: float
    beta: float
    R: int
    max_outer: int = 300
    outer_tol: float = 1e-6
    proximal: ProximalConfig = None
    ista: IstaConfig = field(default_factory=IstaConfig)
    nonneg_theta: float = None
    randomize_order: bool = False

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.R < 1:
            raise ValueError("rank budget must be at least 1")
        if self.max_outer < 1:
            raise ValueError("max_outer must be at least 1")
        if self.nonneg_theta is not None and self.nonneg_theta < 0:
            raise ValueError("nonneg_theta must be non-negative")


@dataclass
class SolveReport:
    decomposition: Decomposition
    objective_trace: np.ndarray
    iterations: int
    converged: bool
    assembled: np.ndarray
    step_sqnorms: np.ndarray

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "objective_trace": [float(x) for x in self.objective_trace],
            "step_sqnorms": [float(x) for x in self.step_sqnorms],
            "u": [u.tolist() for u in self.decomposition.u],
            "v": [v.tolist() for v in self.decomposition.v],
        }


def objective(op: MeasurementOperator, y, d: Decomposition, alpha, beta):
    """||y - A(sum_r u^r (v^r)^T)||^2 + alpha*sum||u^r||_2^2 + beta*sum||v^r||_1."""
    y = np.asarray(y, dtype=float)
    r = y - op.apply(d.assemble())
    pen_u = sum(float(u @ u) for u in d.u)
    pen_v = sum(float(np.abs(v).sum()) for v in d.v)
    return float(r @ r) + alpha * pen_u + beta * pen_v


def balanced_rescale(u, v, alpha, beta):
    """Minimize alpha*||lam*u||_2^2 + beta*||v/lam||_1 over lam > 0.

    Returns (lam*u, v/lam, lam) with the closed-form optimum
    lam = ((1/2) * beta*||v||_1 / (alpha*||u||_2^2))^(1/3).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    a = float(u @ u)
    b = float(np.abs(v).sum())
    if a == 0.0 or b == 0.0:
        raise ValueError("balanced rescaling requires non-zero factors")
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    lam = (0.5 * beta * b / (alpha * a)) ** (1.0 / 3.0)
    return lam * u, v / lam, lam


def init_leading_singular(op: MeasurementOperator, y, R):
    """Initialization from the top-R singular triplets of the adjoint image.

    Scale is split evenly: each side carries sqrt(sigma_r), the unique split
    invariant under the scale gauge. Components beyond the numerical rank are
    zero-filled (with a warning).
    """
    if R > min(op.n1, op.n2):
        raise ValueError("R exceeds min(n1, n2)")
    M = op.adjoint(np.asarray(y, dtype=float))
    U, s, V = np.linalg.svd(M, full_matrices=False)
    us, vs = [], []
    cutoff = 1e-12 * (s[0] if s.size else 0.0)
    deficient = False
    for r in range(R):
        if r < s.size and s[r] > cutoff:
            root = np.sqrt(s[r])
            us.append(root * U[:, r])
            vs.append(root * V[r, :])
        else:
            deficient = True
            us.append(np.zeros(op.n1))
            vs.append(np.zeros(op.n2))
    if deficient:
        warnings.warn("adjoint image has numerical rank below R; trailing "
                      "components initialized to zero", RuntimeWarning)
    return Decomposition(us, vs)


def extract_normalized(d: Decomposition) -> SparseDecomposition:
    """Unit factors plus sigma_r = ||u^r||_2 * ||v^r||_2; zero components get
    sigma 0 with zero placeholder factors."""
    us, vs, sig = [], [], []
    for u, v in zip(d.u, d.v):
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu == 0.0 or nv == 0.0:
            us.append(np.zeros_like(u))
            vs.append(np.zeros_like(v))
            sig.append(0.0)
        else:
            us.append(u / nu)
            vs.append(v / nv)
            sig.append(nu * nv)
    return SparseDecomposition(us, vs, np.asarray(sig))


def atlas_run(op: MeasurementOperator, y, cfg: SolverConfig, init: Decomposition,
              rng=None) -> SolveReport:
    """Alternating minimization: Tikhonov u-steps and ISTA v-steps, cycling
    components in strict Gauss-Seidel order.

    With cfg.proximal set, each subproblem carries an additional quadratic
    proximal term, folded exactly into the Tikhonov system (u-side) and into a
    row-augmented ISTA design (v-side).
    """
    y = np.asarray(y, dtype=float)
    if init.rank != cfg.R:
        raise ValueError("init rank does not match cfg.R")
    if init.u[0].shape != (op.n1,) or init.v[0].shape != (op.n2,):
        raise ValueError("init shapes do not match the operator")

    u = [x.copy() for x in init.u]
    v = [x.copy() for x in init.v]
    R = cfg.R
    theta = 1.0 if cfg.nonneg_theta is None else cfg.nonneg_theta

    # measurement-space contribution of each component, kept current
    contrib = [op.partial_in_u(v[r]) @ u[r] for r in range(R)]

    def current_objective():
        r_vec = y - sum(contrib)
        pen_u = sum(float(x @ x) for x in u)
        pen_v = sum(float(np.abs(x).sum()) for x in v)
        return float(r_vec @ r_vec) + cfg.alpha * pen_u + cfg.beta * pen_v

    trace = [current_objective()]
    step_sqnorms = []
    init_bound = trace[0] / min(cfg.alpha, cfg.beta)

    X_prev = Decomposition(u, v).assemble()
    converged = False
    iterations = 0
    for sweep in range(cfg.max_outer):
        iterations = sweep + 1
        order = list(range(R))
        if cfg.randomize_order:
            if rng is None:
                raise ValueError("randomize_order requires an rng")
            rng.shuffle(order)
        step_sq = 0.0
        for r in order:
            resid = y - (sum(contrib) - contrib[r])

            Mu = op.partial_in_u(v[r])
            if cfg.proximal is not None:
                w = 1.0 / (2.0 * cfg.proximal.lam)
                u_new = tikhonov_solve(Mu, resid, cfg.alpha, prox_weight=w, prox_center=u[r])
            else:
                u_new = tikhonov_solve(Mu, resid, cfg.alpha)
            step_sq += float(np.sum((u_new - u[r]) ** 2))
            u[r] = u_new

            Mv = op.partial_in_v(u[r])
            if cfg.proximal is not None:
                c = np.sqrt(1.0 / (2.0 * cfg.proximal.mu))
                design = np.vstack([Mv, c * np.eye(op.n2)])
                target = np.concatenate([resid, c * v[r]])
            else:
                design, target = Mv, resid
            v_new = ista(design, target, v[r], cfg.beta, cfg.ista, theta=theta)
            step_sq += float(np.sum((v_new - v[r]) ** 2))
            v[r] = v_new

            contrib[r] = Mv @ v[r]

        step_sqnorms.append(step_sq)
        obj = current_objective()
        trace.append(obj)
        if not np.isfinite(obj):
            raise DivergenceError("non-finite objective; use SafeStep ISTA")
        if cfg.ista.step_policy == "safe":
            # coercivity consequence: iterates stay bounded by J(init)/min(alpha, beta)
            for x in u:
                assert float(x @ x) <= init_bound + 1e-9 * (1.0 + init_bound)
        X = Decomposition(u, v).assemble()
        change = np.linalg.norm(X - X_prev)
        if change <= cfg.outer_tol * max(np.linalg.norm(X), 1e-30):
            X_prev = X
            converged = True
            break
        X_prev = X

    d = Decomposition(u, v)
    return SolveReport(
        decomposition=d,
        objective_trace=np.asarray(trace),
        iterations=iterations,
        converged=converged,
        assembled=X_prev,
        step_sqnorms=np.asarray(step_sqnorms),
    )
