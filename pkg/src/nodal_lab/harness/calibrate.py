"""Fit the unquantified typicality constants from a recorded Monte Carlo run.

Each constant is the smallest value (rounded up to two significant digits)
for which the matching condition holds in the target fraction of trials.
Run ``python3 -m nodal_lab.harness.calibrate`` to regenerate the data file.
"""
from __future__ import annotations

import argparse
import json
import math
from pathlib import Path

import numpy as np

from ..deloc import DEFAULT_EPS_LR, phi_n
from .runner import build_config, run_experiment

DATA_PATH = Path(__file__).resolve().parent.parent / "data" / "calibration.json"


def _round_up(x: float, digits: int = 2) -> float:
    if x <= 0:
        return 0.0
    scale = 10 ** (digits - 1 - math.floor(math.log10(x)))
    return math.ceil(x * scale) / scale


def calibrate_typicality(n: int = 1000, trials: int = 20, seed: int = 20240601, quantile: float = 0.9,
                         minor_samples: int = 4) -> dict:
    cfg = build_config("typicality", n=n, trials=trials, master_seed=seed,
                       params={"calibrated": False, "minor_samples": minor_samples})
    rep = run_experiment(cfg)
    col = {k: np.array([r[k] for r in rep.rows], dtype=np.float64) for k in
           ("isotropic_law_residual", "isotropic_overlap", "minor_closeness_max", "rigidity_max", "linf_max")}
    q = {k: float(np.quantile(v, quantile)) for k, v in col.items()}
    e, phi = DEFAULT_EPS_LR, phi_n(n)
    constants = {
        "iso_const": max(3.0, _round_up(q["isotropic_law_residual"] / n ** (-1 / 3 + 3 * e))),
        "c_iso": max(1.0, _round_up(math.log(q["isotropic_overlap"]) / (e * math.log(n)))),
        "C": max(1.0, _round_up(math.log(q["minor_closeness_max"] * n) / math.log(phi))),
        "C_re": max(1.0, _round_up(math.log(q["rigidity_max"]) / math.log(phi))),
    }
    return {
        "run": {"n": n, "trials": trials, "master_seed": seed, "quantile": quantile, "minor_samples": minor_samples},
        "quantiles": q,
        "constants": constants,
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--out", default=str(DATA_PATH))
    args = ap.parse_args(argv)
    result = calibrate_typicality(args.n, args.trials, args.seed)
    Path(args.out).write_text(json.dumps(result, indent=1, sort_keys=True) + "\n")
    print(json.dumps(result, indent=1, sort_keys=True))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
