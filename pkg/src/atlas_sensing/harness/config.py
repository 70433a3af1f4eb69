"""Experiment configuration: a single strict JSON document.

Every field has a default; unknown fields are rejected with a diagnostic
naming the offending key so typos cannot silently fall back to defaults.
"""

import json
from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


KINDS = (
    "noise_sweep",
    "param_sweep",
    "norm_sweep",
    "phase",
    "init_study",
    "rip_sweep",
    "single",
)

ALPHA_BETA_RULES = ("fixed", "ratio", "noise_adapted")
INIT_MODES = ("adjoint_svd", "perturbed_truth")
REDRAW_MODES = ("per_sweep", "per_trial")


@dataclass
class SolverSection:
    alpha: float = 0.5
    beta: float = 0.5
    max_outer: int = 300
    outer_tol: float = 1e-6
    ista_max_iters: int = 500
    ista_tol: float = 1e-8
    step_policy: str = "safe"
    proximal_lambda: float = None
    proximal_mu: float = None
    nonneg_theta: float = None


@dataclass
class RipSection:
    samples: int = 1000
    probes: int = 20
    gamma: float = 1.0


@dataclass
class ExperimentSpec:
    kind: str = "single"
    n1: int = 16
    n2: int = 100
    R: int = 1
    s: int = 10
    s_grid: list = None
    m: int = 90
    m_grid: list = None
    noise_grid: list = field(default_factory=lambda: [0.0])
    alpha_beta_rule: str = "fixed"
    ratio_kappa: float = 1.0
    beta_grid: list = None
    trials: int = 20
    base_seed: int = 0
    success_thresholds: list = field(default_factory=lambda: [0.2, 0.4])
    operator_redraw: str = None  # default depends on kind
    init_mode: str = "adjoint_svd"
    perturbation_norm: float = 0.2
    target_frobenius: float = 10.0
    norm_grid: list = None
    matrix_class: str = "exact"
    common_support: bool = False
    orthonormalize: bool = False
    gamma_cap: float = None
    ensemble: str = "gaussian"
    solver: SolverSection = field(default_factory=SolverSection)
    rip: RipSection = field(default_factory=RipSection)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.alpha_beta_rule not in ALPHA_BETA_RULES:
            raise ConfigError(
                f"unknown alpha_beta_rule {self.alpha_beta_rule!r}; "
                f"expected one of {ALPHA_BETA_RULES}"
            )
        if self.init_mode not in INIT_MODES:
            raise ConfigError(f"unknown init_mode {self.init_mode!r}")
        if self.operator_redraw is None:
            # the noise sweep reproduces a fixed-operator study; diagrams redraw
            self.operator_redraw = "per_sweep" if self.kind == "noise_sweep" else "per_trial"
        if self.operator_redraw not in REDRAW_MODES:
            raise ConfigError(f"unknown operator_redraw {self.operator_redraw!r}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        for name in ("noise_grid", "success_thresholds"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be non-empty")
        if self.kind == "param_sweep" and not self.beta_grid:
            raise ConfigError("param_sweep requires a non-empty beta_grid")
        if self.kind == "norm_sweep" and not self.norm_grid:
            raise ConfigError("norm_sweep requires a non-empty norm_grid")
        if self.kind in ("phase", "init_study"):
            if not self.s_grid:
                raise ConfigError(f"{self.kind} requires a non-empty s_grid")
            if not self.m_grid:
                raise ConfigError(f"{self.kind} requires a non-empty m_grid")
        if self.kind == "rip_sweep" and not self.m_grid:
            raise ConfigError("rip_sweep requires a non-empty m_grid")
        if self.matrix_class not in ("exact", "effective"):
            raise ConfigError(f"unknown matrix_class {self.matrix_class!r}")
        if self.ensemble not in ("gaussian", "rademacher"):
            raise ConfigError(f"unknown ensemble {self.ensemble!r}")
        if self.solver.step_policy not in ("safe", "unit"):
            raise ConfigError(f"unknown step_policy {self.solver.step_policy!r}")

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        for section_name, section_cls in (("solver", SolverSection), ("rip", RipSection)):
            if section_name in data:
                sub = data[section_name]
                if not isinstance(sub, dict):
                    raise ConfigError(f"{section_name} must be an object")
                known = {f.name for f in fields(section_cls)}
                for key in sub:
                    if key not in known:
                        raise ConfigError(f"unknown field {section_name}.{key!r}")
                data[section_name] = section_cls(**sub)
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(f"unknown field {key!r}")
        try:
            return cls(**data)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json_file(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self):
        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            if f.name in ("solver", "rip"):
                val = {sf.name: getattr(val, sf.name) for sf in fields(val)}
            out[f.name] = val
        return out


def fnv1a64(text):
    """64-bit FNV-1a hash of a UTF-8 string; used to derive per-trial seeds."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h
