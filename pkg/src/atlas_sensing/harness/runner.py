"""Seeded experiment runners for the desk-scale studies, plus CSV/JSON
emission.

Every trial is a pure function of (config, base_seed, cell, trial index);
cells and trials may run in a process pool, and results are ordered before
emission, so output bytes never depend on the worker count. Wall-clock
timings consequently live in run.json, not in trials.csv.
"""

import concurrent.futures
import json
import os
import platform
import sys
import time

import numpy as np

from .. import __version__
from ..analysis import (
    BoundParams,
    check_boundedness,
    check_sparsity_control,
    corollary_bound,
    relative_error,
    rip_probe,
    theorem_bound,
)
from ..atlas import (
    Decomposition,
    ProximalConfig,
    SolverConfig,
    atlas_run,
    init_leading_singular,
)
from ..measurement import add_noise, sample_operator
from ..models import GroundTruthSpec, sample_ground_truth, schatten_quasi_norm
from ..solvers import IstaConfig, KERNEL_BACKEND
from .config import ConfigError, ExperimentSpec, fnv1a64

TRIALS_HEADER = (
    "kind,n1,n2,R,s,m,noise_ratio,alpha,beta,trial,seed,rel_error,"
    "success_02,success_04,iters,objective,wall_ms"
)
SUMMARY_HEADER = (
    "kind,n1,n2,R,s,m,noise_ratio,alpha,beta,target_frobenius,init_mode,"
    "trials,mean_rel_error,success_rate_02,success_rate_04,bound_rel,"
    "sparsity_fraction"
)

# init-study arms: (label, perturbation norm or None for the adjoint route)
INIT_ARMS = (
    ("perturbed_strong", 100.0),
    ("adjoint_svd", None),
    ("perturbed_mild", 0.2),
)

_SPARSITY_CUTOFF = 1e-8


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _derived_rng(*parts):
    seed = fnv1a64("|".join(str(p) for p in parts))
    return seed, np.random.default_rng(seed)


def _cells(spec: ExperimentSpec):
    """Enumerate the cell coordinate dicts for the configured study."""
    kind = spec.kind
    if kind == "noise_sweep":
        return [{"noise_ratio": float(r)} for r in spec.noise_grid]
    if kind == "param_sweep":
        return [
            {"beta": float(b), "noise_ratio": float(spec.noise_grid[0])}
            for b in spec.beta_grid
        ]
    if kind == "norm_sweep":
        return [
            {"target_frobenius": float(t), "noise_ratio": float(spec.noise_grid[0])}
            for t in spec.norm_grid
        ]
    if kind == "phase":
        return [
            {"s": int(s), "m": int(m), "noise_ratio": float(spec.noise_grid[0])}
            for s in spec.s_grid
            for m in spec.m_grid
        ]
    if kind == "init_study":
        return [
            {"s": int(s), "m": int(m), "noise_ratio": float(spec.noise_grid[0]),
             "arm": label, "perturbation": pert}
            for s in spec.s_grid
            for m in spec.m_grid
            for (label, pert) in INIT_ARMS
        ]
    if kind == "rip_sweep":
        return [{"m": int(m)} for m in spec.m_grid]
    return [{"noise_ratio": float(spec.noise_grid[0])}]  # single


def _resolve_alpha_beta(spec, cell, noise_norm, schatten_23):
    if spec.kind == "param_sweep" or "beta" in cell:
        beta = cell["beta"]
        return spec.ratio_kappa * beta, beta
    if spec.alpha_beta_rule == "noise_adapted":
        if noise_norm <= 0:
            raise ConfigError("noise_adapted alpha/beta rule requires positive noise")
        val = noise_norm**2 / schatten_23 ** (2.0 / 3.0)
        return val, val
    if spec.alpha_beta_rule == "ratio":
        beta = spec.solver.beta
        return spec.ratio_kappa * beta, beta
    return spec.solver.alpha, spec.solver.beta


def _ground_truth(spec, cell, trial):
    s2 = cell.get("s", spec.s)
    target = cell.get("target_frobenius", spec.target_frobenius)
    gspec = GroundTruthSpec(
        n1=spec.n1,
        n2=spec.n2,
        R=spec.R,
        matrix_class=spec.matrix_class,
        s1=spec.n1,
        s2=s2,
        gamma_cap=spec.gamma_cap,
        common_support=spec.common_support,
        orthonormalize=spec.orthonormalize,
        target_frobenius=target,
    )
    # paired design: the instance seed ignores m, noise level, alpha/beta, arm
    seed, rng = _derived_rng(
        spec.base_seed, "instance", spec.n1, spec.n2, spec.R, s2,
        spec.matrix_class, spec.common_support, spec.orthonormalize,
        repr(float(target)), trial,
    )
    return sample_ground_truth(gspec, rng), seed


def _operator(spec, cell, trial):
    m = cell.get("m", spec.m)
    parts = [spec.base_seed, "operator", m, spec.n1, spec.n2, spec.ensemble]
    if spec.operator_redraw == "per_trial":
        parts.append(trial)
    _, rng = _derived_rng(*parts)
    return sample_operator(m, spec.n1, spec.n2, ensemble=spec.ensemble, rng=rng)


def _perturbed_truth_init(matrix, R, pert_norm, rng):
    Z = rng.standard_normal(matrix.shape)
    Z *= pert_norm / np.linalg.norm(Z)
    U, s, V = np.linalg.svd(matrix + Z, full_matrices=False)
    us = [np.sqrt(s[r]) * U[:, r] for r in range(R)]
    vs = [np.sqrt(s[r]) * V[r, :] for r in range(R)]
    return Decomposition(us, vs)


def _solver_config(spec, alpha, beta):
    prox = None
    if spec.solver.proximal_lambda is not None or spec.solver.proximal_mu is not None:
        prox = ProximalConfig(
            lam=spec.solver.proximal_lambda or 1.0,
            mu=spec.solver.proximal_mu or 1.0,
        )
    return SolverConfig(
        alpha=alpha,
        beta=beta,
        R=spec.R,
        max_outer=spec.solver.max_outer,
        outer_tol=spec.solver.outer_tol,
        proximal=prox,
        ista=IstaConfig(
            max_iters=spec.solver.ista_max_iters,
            tol=spec.solver.ista_tol,
            step_policy=spec.solver.step_policy,
        ),
        nonneg_theta=spec.solver.nonneg_theta,
    )


def run_trial(spec: ExperimentSpec, cell, trial):
    """One full pipeline run; returns (row dict, extras dict)."""
    t0 = time.perf_counter()
    if spec.kind == "rip_sweep":
        return _rip_trial(spec, cell, trial, t0)

    m = cell.get("m", spec.m)
    s2 = cell.get("s", spec.s)
    noise_ratio = cell.get("noise_ratio", 0.0)
    target = cell.get("target_frobenius", spec.target_frobenius)

    gt, inst_seed = _ground_truth(spec, cell, trial)
    op = _operator(spec, cell, trial)
    clean = op.apply(gt.matrix)
    _, noise_rng = _derived_rng(spec.base_seed, "noise", m, repr(float(noise_ratio)), trial)
    sample = add_noise(clean, noise_ratio, target, noise_rng)

    schatten_23 = schatten_quasi_norm(gt.matrix, 2.0 / 3.0)
    alpha, beta = _resolve_alpha_beta(spec, cell, sample.noise_norm, schatten_23)
    cfg = _solver_config(spec, alpha, beta)

    arm = cell.get("arm", spec.init_mode)
    pert = cell.get("perturbation")
    if arm == "adjoint_svd":
        init = init_leading_singular(op, sample.y, spec.R)
    else:
        if pert is None:
            pert = spec.perturbation_norm
        _, prng = _derived_rng(spec.base_seed, "perturbation", repr(float(pert)), trial)
        init = _perturbed_truth_init(gt.matrix, spec.R, pert, prng)

    report = atlas_run(op, sample.y, cfg, init)
    rel = relative_error(gt.matrix, report.assembled)
    thr_lo = spec.success_thresholds[0]
    thr_hi = spec.success_thresholds[-1]

    kind_label = spec.kind if "arm" not in cell else f"{spec.kind}:{cell['arm']}"
    row = {
        "kind": kind_label,
        "n1": spec.n1,
        "n2": spec.n2,
        "R": spec.R,
        "s": s2,
        "m": m,
        "noise_ratio": float(noise_ratio),
        "alpha": float(alpha),
        "beta": float(beta),
        "trial": trial,
        "seed": inst_seed,
        "rel_error": float(rel),
        "success_02": int(rel <= thr_lo),
        "success_04": int(rel <= thr_hi),
        "iters": report.iterations,
        "objective": float(report.objective_trace[-1]),
        "wall_ms": 0,
    }

    extras = {
        "wall_ms": (time.perf_counter() - t0) * 1000.0,
        "target_frobenius": float(target),
        "init_mode": arm,
        "instance_hash": fnv1a64(gt.matrix.tobytes().hex()),
    }
    if spec.kind in ("noise_sweep", "norm_sweep", "single"):
        from ..models import gramian_constants

        c_U = gramian_constants(gt.decomposition.u_factors)[0] if spec.R > 1 else 1.0
        params = BoundParams(
            s=s2, R=spec.R, c_U=c_U, noise_norm=sample.noise_norm,
            schatten_23=schatten_23, delta=0.0,
        )
        extras["corollary_bound_rel"] = corollary_bound(params) / target
        extras["theorem_bound_rel"] = theorem_bound(params, alpha, beta) / target
    if spec.kind == "param_sweep":
        lead = max(
            range(spec.R),
            key=lambda r: np.linalg.norm(report.decomposition.u[r])
            * np.linalg.norm(report.decomposition.v[r]),
        )
        v = report.decomposition.v[lead]
        extras["sparsity_fraction"] = float(np.mean(np.abs(v) > _SPARSITY_CUTOFF))
    if spec.kind == "single":
        extras["report"] = report.to_dict()
        extras["boundedness"] = check_boundedness(
            gt, report, op, sample.y, alpha, beta, sample.noise_norm
        ).to_dict()
        gamma = spec.rip.gamma
        extras["sparsity_control"] = [
            v.to_dict() for v in check_sparsity_control(report, sample.y, beta, gamma)
        ]
    return row, extras


def _rip_trial(spec, cell, probe, t0):
    m = cell["m"]
    op = _operator(spec, cell, probe)
    probe_seed = fnv1a64(f"{spec.base_seed}|rip|{m}|{probe}")
    report = rip_probe(
        op,
        matrix_class=spec.matrix_class,
        R=spec.R,
        s1=spec.n1,
        s2=spec.s,
        gamma=spec.rip.gamma,
        samples=spec.rip.samples,
        seed=probe_seed,
    )
    # schema mapping: rel_error <- max deviation, objective <- mean deviation,
    # iters <- sample count
    row = {
        "kind": "rip_sweep",
        "n1": spec.n1,
        "n2": spec.n2,
        "R": spec.R,
        "s": spec.s,
        "m": m,
        "noise_ratio": 0.0,
        "alpha": 0.0,
        "beta": 0.0,
        "trial": probe,
        "seed": probe_seed,
        "rel_error": report.max_deviation,
        "success_02": 0,
        "success_04": 0,
        "iters": report.samples,
        "objective": report.mean_deviation,
        "wall_ms": 0,
    }
    extras = {
        "wall_ms": (time.perf_counter() - t0) * 1000.0,
        "rip_report": report.to_dict(),
        "target_frobenius": float(spec.target_frobenius),
        "init_mode": spec.init_mode,
    }
    return row, extras


def _worker(args):
    spec_dict, cell, trial = args
    spec = ExperimentSpec.from_dict(spec_dict)
    return run_trial(spec, cell, trial)


def run_experiment(spec: ExperimentSpec, out_dir, threads=1, fmt="csv"):
    """Run all cells x trials, write trials/summary/run.json into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    cells = _cells(spec)
    n_trials = spec.trials if spec.kind != "rip_sweep" else spec.rip.probes
    items = [(cell, trial) for cell in cells for trial in range(n_trials)]

    t_start = time.perf_counter()
    if threads > 1:
        spec_dict = spec.to_dict()
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_worker, [(spec_dict, c, t) for c, t in items],
                                    chunksize=1))
    else:
        results = [run_trial(spec, cell, trial) for cell, trial in items]
    total_wall = time.perf_counter() - t_start

    rows = [r for r, _ in results]
    extras = [e for _, e in results]

    summary_rows = _summarize(spec, cells, n_trials, rows, extras)
    _write_tables(out_dir, rows, summary_rows, fmt)

    run_info = {
        "config": spec.to_dict(),
        "environment": {
            "package_version": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "platform": platform.platform(),
            "kernel_backend": KERNEL_BACKEND,
        },
        "total_wall_seconds": total_wall,
        "trial_wall_ms": [e["wall_ms"] for e in extras],
    }
    for key in ("report", "boundedness", "sparsity_control", "rip_report"):
        payload = [e[key] for e in extras if key in e]
        if payload:
            run_info[key + "s" if not key.endswith("s") else key] = payload
    with open(os.path.join(out_dir, "run.json"), "w") as fh:
        json.dump(run_info, fh, indent=2)
    return rows, summary_rows


def _summarize(spec, cells, n_trials, rows, extras):
    summary = []
    for i, cell in enumerate(cells):
        block = rows[i * n_trials:(i + 1) * n_trials]
        eblock = extras[i * n_trials:(i + 1) * n_trials]
        first = block[0]
        mean_err = sum(r["rel_error"] for r in block) / n_trials
        rate_lo = sum(r["success_02"] for r in block) / n_trials
        rate_hi = sum(r["success_04"] for r in block) / n_trials
        bound_key = "corollary_bound_rel" if spec.kind == "noise_sweep" else "theorem_bound_rel"
        bounds = [e[bound_key] for e in eblock if bound_key in e]
        sparsities = [e["sparsity_fraction"] for e in eblock if "sparsity_fraction" in e]
        summary.append({
            "kind": first["kind"],
            "n1": first["n1"],
            "n2": first["n2"],
            "R": first["R"],
            "s": first["s"],
            "m": first["m"],
            "noise_ratio": first["noise_ratio"],
            "alpha": sum(r["alpha"] for r in block) / n_trials,
            "beta": sum(r["beta"] for r in block) / n_trials,
            "target_frobenius": eblock[0]["target_frobenius"],
            "init_mode": eblock[0]["init_mode"],
            "trials": n_trials,
            "mean_rel_error": mean_err,
            "success_rate_02": rate_lo,
            "success_rate_04": rate_hi,
            "bound_rel": sum(bounds) / len(bounds) if bounds else "",
            "sparsity_fraction": sum(sparsities) / len(sparsities) if sparsities else "",
        })
    return summary


def _write_tables(out_dir, rows, summary_rows, fmt):
    if fmt == "json":
        with open(os.path.join(out_dir, "trials.json"), "w") as fh:
            json.dump(rows, fh, indent=2)
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(summary_rows, fh, indent=2)
        return
    trial_cols = TRIALS_HEADER.split(",")
    with open(os.path.join(out_dir, "trials.csv"), "w", newline="\n") as fh:
        fh.write(TRIALS_HEADER + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in trial_cols) + "\n")
    summary_cols = SUMMARY_HEADER.split(",")
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for row in summary_rows:
            fh.write(",".join(_fmt(row[c]) for c in summary_cols) + "\n")
