"""Experiment configs, the seeded runner, reports and the command line."""
from .config import ExperimentConfig
from .experiments import REGISTRY, get_experiment
from .report import StatReport, emit
from .runner import build_config, recompute, run_experiment

__all__ = [
    "ExperimentConfig",
    "REGISTRY",
    "StatReport",
    "build_config",
    "emit",
    "get_experiment",
    "recompute",
    "run_experiment",
]
