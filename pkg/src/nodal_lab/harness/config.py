"""Experiment configuration and its key-value file format.

A config file holds one ``key = value`` pair per line.  Values are parsed
as JSON when possible and kept as strings otherwise.  Threshold and
experiment-parameter entries use dotted keys (``thresholds.two_domains``,
``params.alpha``).  Lines starting with ``#`` are comments.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ..errors import ConfigurationError, DataError
from ..spectral import MAX_DENSE_N

_SCALARS = ("experiment", "n", "p", "trials", "master_seed", "bulk_fraction", "workers")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int
    p: float = 0.5
    trials: int = 1
    master_seed: int = 0
    bulk_fraction: float = 0.25
    edge_indices: tuple = ()
    thresholds: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self):
        if int(self.trials) < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if not 0.0 < float(self.bulk_fraction) < 0.5:
            raise ConfigurationError(f"bulk fraction must lie in (0, 1/2), got {self.bulk_fraction}")
        if not 0.0 < float(self.p) < 1.0:
            raise ConfigurationError(f"p must lie in (0, 1), got {self.p}")
        if not 2 <= int(self.n) <= MAX_DENSE_N:
            raise ConfigurationError(f"n must lie in [2, {MAX_DENSE_N}], got {self.n}")
        if int(self.workers) < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigurationError("master seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "edge_indices", tuple(int(a) for a in self.edge_indices))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["edge_indices"] = list(self.edge_indices)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def with_updates(self, **kw) -> "ExperimentConfig":
        d = self.to_dict()
        for key, value in kw.items():
            if key in ("thresholds", "params"):
                d[key] = {**d[key], **value}
            else:
                d[key] = value
        return ExperimentConfig.from_dict(d)

    def to_text(self) -> str:
        lines = [f"{k} = {json.dumps(getattr(self, k))}" for k in _SCALARS]
        lines.append(f"edge_indices = {json.dumps(list(self.edge_indices))}")
        for group in ("thresholds", "params"):
            for key in sorted(getattr(self, group)):
                lines.append(f"{group}.{key} = {json.dumps(getattr(self, group)[key])}")
        return "\n".join(lines) + "\n"


def _parse_value(text: str):
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_config_text(text: str) -> dict:
    out: dict = {"thresholds": {}, "params": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if "." in key:
            group, sub = key.split(".", 1)
            if group not in ("thresholds", "params"):
                raise ConfigurationError(f"line {lineno}: unknown group {group!r}")
            out[group][sub] = _parse_value(value)
        else:
            out[key] = _parse_value(value)
    return out


def load_config_file(path) -> dict:
    """Raw key-value mapping; merged with CLI flags and experiment defaults later."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    return parse_config_text(text)
