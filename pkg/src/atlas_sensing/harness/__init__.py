from .config import ConfigError, ExperimentSpec
from .runner import TRIALS_HEADER, SUMMARY_HEADER, run_experiment

__all__ = [
    "ConfigError",
    "ExperimentSpec",
    "TRIALS_HEADER",
    "SUMMARY_HEADER",
    "run_experiment",
]
