"""Command line entry point: ``nodal-lab <experiment> [options]``."""
from __future__ import annotations

import argparse
import sys

from ..errors import NodalLabError
from .config import load_config_file
from .experiments import REGISTRY
from .report import emit
from .runner import build_config, run_experiment


def _parse_set(items) -> tuple[dict, dict]:
    from .config import _parse_value

    params, thresholds = {}, {}
    for item in items or ():
        if "=" not in item:
            raise NodalLabError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        group, _, sub = key.partition(".")
        if group == "thresholds" and sub:
            thresholds[sub] = _parse_value(value)
        elif group == "params" and sub:
            params[sub] = _parse_value(value)
        else:
            params[key] = _parse_value(value)
    return params, thresholds


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nodal-lab", description="Seeded Monte Carlo experiments on random graph spectra.")
    ap.add_argument("experiment", help="experiment name, or 'list'")
    ap.add_argument("--n", type=int)
    ap.add_argument("--p", type=float)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int, dest="master_seed")
    ap.add_argument("--config", help="key = value config file")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--format", choices=("csv", "json", "both"), default="csv")
    ap.add_argument("--workers", type=int)
    ap.add_argument("--set", action="append", metavar="KEY=VALUE",
                    help="experiment parameter or thresholds.NAME override; repeatable")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if args.experiment == "list":
        for name in sorted(REGISTRY):
            print(f"{name:24s} {REGISTRY[name].summary}")
        return 0
    try:
        base = load_config_file(args.config) if args.config else {}
        named = base.pop("experiment", args.experiment)
        if named != args.experiment:
            raise NodalLabError(f"config file is for {named!r}, not {args.experiment!r}")
        params, thresholds = _parse_set(args.set)
        base["params"] = {**base.get("params", {}), **params}
        base["thresholds"] = {**base.get("thresholds", {}), **thresholds}
        for key in ("n", "p", "trials", "master_seed", "workers"):
            if getattr(args, key) is not None:
                base[key] = getattr(args, key)
        cfg = build_config(args.experiment, **base)
        report = run_experiment(cfg)
        print(report.summary())
        if args.out:
            for path in emit(report, args.out, args.format):
                print(f"wrote {path}")
    except NodalLabError as exc:
        print(f"nodal-lab: error: {exc}", file=sys.stderr)
        return 2
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
