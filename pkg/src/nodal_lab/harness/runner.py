"""Seeded Monte Carlo runner.

Trial ``t`` of a campaign uses the seed ``trial_seed(master_seed, t)`` and
nothing else, so the rows do not depend on how trials are spread over
worker processes.  BLAS is pinned to one thread inside every trial.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor

from threadpoolctl import threadpool_limits

from .._rng import trial_seed
from ..errors import ConfigurationError
from .config import ExperimentConfig
from .experiments import get_experiment, resolve_thresholds
from .report import StatReport


def build_config(experiment: str, **overrides) -> ExperimentConfig:
    """Config with experiment defaults filled in and thresholds resolved for ``n``."""
    exp = get_experiment(experiment)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    n = int(overrides.pop("n", exp.n))
    if exp.max_n is not None and n > exp.max_n:
        raise ConfigurationError(f"{experiment} is capped at n={exp.max_n}, got {n}")
    params = {**exp.params, **overrides.pop("params", {})}
    unknown = set(params) - set(exp.params) - {"q"}
    if unknown:
        raise ConfigurationError(f"unknown parameters for {experiment}: {sorted(unknown)}")
    thresholds = resolve_thresholds(exp, n, overrides.pop("thresholds", {}))
    edge = overrides.pop("edge_indices", None)
    if not edge and exp.edge_indices is not None:
        edge = exp.edge_indices(n)
    trials = int(overrides.pop("trials", exp.trials))
    if exp.single_trial:
        trials = 1
    overrides.pop("experiment", None)
    return ExperimentConfig(
        experiment=experiment, n=n, trials=trials, thresholds=thresholds, params=params,
        edge_indices=tuple(edge or ()), **overrides,
    )


def _run_trial(args) -> list:
    name, cfg, t = args
    exp = get_experiment(name)
    seed = trial_seed(cfg["master_seed"], t)
    with threadpool_limits(limits=1):
        rows = exp.trial(cfg, t, seed)
    return [{"trial": t, "seed": seed, **r} for r in rows]


def run_experiment(cfg: ExperimentConfig) -> StatReport:
    exp = get_experiment(cfg.experiment)
    d = cfg.to_dict()
    jobs = [(cfg.experiment, d, t) for t in range(cfg.trials)]
    start = time.perf_counter()
    if cfg.workers == 1:
        chunks = [_run_trial(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_run_trial, jobs))
    # ordered fold by trial index
    rows = [r for chunk in chunks for r in chunk]
    aggregates, checks = exp.aggregate(rows, d)
    return StatReport(
        experiment=cfg.experiment,
        config=d,
        columns=list(exp.columns),
        rows=rows,
        aggregates=aggregates,
        checks=checks,
        wall_time=time.perf_counter() - start,
    )


def recompute(report: StatReport):
    """Aggregates and checks rebuilt from the stored rows and config."""
    exp = get_experiment(report.experiment)
    return exp.aggregate(report.rows, report.config)
