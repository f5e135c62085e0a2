"""Time the compiled and pure-Python kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--n 1000] [--repeat 5] [--json out.json]

Each kernel is checked for agreement between the backends before timing.
"""
from __future__ import annotations

import argparse
import json
import math
import timeit

import numpy as np

from nodal_lab import kernels
from nodal_lab.ensembles import centered_wigner, sample_gnp
from nodal_lab.spectral import eigendecompose


def _inputs(n: int, seed: int = 0) -> dict:
    A = sample_gnp(n, 0.5, seed)
    H = centered_wigner(A, 0.5)
    spec = eigendecompose(H)
    v = spec.vector(n // 2)
    signs = np.sign(v).astype(np.int8)
    rng = np.random.default_rng(seed)
    mu = spec.eigenvalues[2:].copy()
    a1, a2 = rng.standard_normal(n - 2) / math.sqrt(n), rng.standard_normal(n - 2) / math.sqrt(n)
    z = spec.overlaps(np.full(n, 1 / math.sqrt(n)))
    return {
        "adj": np.ascontiguousarray(A.entries),
        "signs": signs,
        "nu": np.ascontiguousarray(spec.eigenvalues),
        "z2": np.ascontiguousarray(z * z),
        "c": math.sqrt(n),
        "mu": np.ascontiguousarray(mu),
        "a1": a1,
        "a2": a2,
    }


def _cases(x: dict) -> dict:
    mu = x["mu"]
    # detection roots in the top 20 pole intervals of one branch
    brackets = [(mu[k + 1] + 1e-12, mu[k] - 1e-12) for k in range(20)]

    def labels(mod):
        return mod.label_sign_components(x["adj"], x["signs"])

    def secular(mod):
        return mod.secular_roots(x["nu"], x["z2"], x["c"])

    def green(mod):
        return [mod.green_entries(mu, x["a1"], x["a2"], E) for E in np.linspace(2.05, 2.5, 50)]

    def detection(mod):
        return [mod.detection_branch_root(mu, x["a1"], x["a2"], 0.0, 0.0, 0.0, lo, hi, 1, 8) for lo, hi in brackets]

    return {"label_sign_components": labels, "secular_roots": secular, "green_entries": green,
            "detection_branch_root": detection}


def _agree(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_agree(p, q) for p, q in zip(a, b))
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return bool(np.allclose(a, b, rtol=1e-12, atol=1e-14, equal_nan=True))


def run(n: int, repeat: int) -> list:
    mods = {"python": kernels.backend("python")}
    try:
        mods["cython"] = kernels.backend("cython")
    except ImportError:
        print("compiled backend not built; timing the fallback only")
    cases = _cases(_inputs(n))
    results = []
    for name, fn in cases.items():
        outs = {b: fn(m) for b, m in mods.items()}
        agree = _agree(outs["python"], outs["cython"]) if "cython" in outs else None
        row = {"kernel": name, "n": n, "agree": agree}
        for b, m in mods.items():
            t = timeit.Timer(lambda: fn(m))
            number, _ = t.autorange()
            row[f"{b}_s"] = min(t.repeat(repeat, number)) / number
        if "cython" in mods:
            row["speedup"] = row["python_s"] / row["cython_s"]
        results.append(row)
    return results


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json")
    args = ap.parse_args(argv)
    rows = run(args.n, args.repeat)
    print(f"{'kernel':24s} {'python':>11s} {'cython':>11s} {'speedup':>8s}  agree")
    for r in rows:
        cy = f"{r['cython_s'] * 1e3:9.3f}ms" if "cython_s" in r else "        -  "
        sp = f"{r['speedup']:7.1f}x" if "speedup" in r else "      - "
        print(f"{r['kernel']:24s} {r['python_s'] * 1e3:9.3f}ms {cy} {sp}  {r['agree']}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
