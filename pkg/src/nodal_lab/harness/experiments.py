"""Named experiments.

Each experiment supplies default settings, a per-trial function returning
rows of metrics, and an aggregation that turns all rows into summary
statistics and threshold checks.  Thresholds live in the config; the
defaults below only fill in the ones the caller did not set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import eigh

from .. import edge, greenlaw, nodal, signpoly
from .._rng import make_rng
from ..deloc import TypicalityParams, calibrated_constants, level_repulsion_min_gap, phi_n, typicality_check
from ..ensembles import (
    SymmetricMatrix,
    block_decompose,
    centered_wigner,
    normalize_shifted,
    rank_one_strength,
    sample_gnp,
    sample_goe,
)
from ..errors import ConfigurationError
from ..spectral import eigendecompose, fix_signs
from .report import Check, describe, frequency


@dataclass(frozen=True)
class Experiment:
    name: str
    summary: str
    trial: object
    aggregate: object
    columns: tuple
    n: int
    trials: int
    thresholds: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    edge_indices: object = None
    max_n: int | None = None
    single_trial: bool = False


REGISTRY: dict = {}


def register(exp: Experiment) -> Experiment:
    REGISTRY[exp.name] = exp
    return exp


def get_experiment(name: str) -> Experiment:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ConfigurationError(f"unknown experiment {name!r}; choose from {sorted(REGISTRY)}") from None


def resolve_thresholds(exp: Experiment, n: int, given: dict) -> dict:
    out = {}
    for key, default in exp.thresholds.items():
        out[key] = float(given[key]) if key in given else float(default(n) if callable(default) else default)
    unknown = set(given) - set(out)
    if unknown:
        raise ConfigurationError(f"unknown thresholds for {exp.name}: {sorted(unknown)}")
    return out


def _freq_check(name, flags, threshold, op=">=") -> tuple:
    f = frequency(flags)
    return f, Check(name, f["value"], threshold, op)


# ---------------------------------------------------------------------------
# nodal domains of bulk and edge eigenvectors


def _adjacency_vectors(cfg: dict, seed: int, indices) -> tuple:
    A = sample_gnp(cfg["n"], cfg["p"], seed)
    n = A.n
    lo, hi = min(indices), max(indices)
    # eigh numbers eigenvalues in ascending order; alpha counts from the top
    lam, vec = eigh(A.as_float(), subset_by_index=[n - hi, n - lo])
    vec = fix_signs(vec)
    cols = {alpha: vec[:, hi - alpha] for alpha in indices}
    return A, cols


def _nodal_rows(A, cols, zero_tol) -> list:
    rows = []
    for alpha, v in sorted(cols.items()):
        dec = nodal.nodal_domains(A, v, zero_tol)
        rows.append({
            "alpha": alpha,
            "domain_count": dec.domain_count,
            "balance": max(dec.p_size, dec.n_size) / dec.n,
            "zero_count": dec.zero_count,
        })
    return rows


def bulk_trial(cfg: dict, t: int, seed: int) -> list:
    n, kappa = cfg["n"], cfg["bulk_fraction"]
    k = int(cfg["params"]["indices_per_trial"])
    lo, hi = max(2, math.ceil(kappa * n)), math.floor(n - kappa * n)
    rng = make_rng((seed, 1))
    alphas = sorted(int(a) for a in rng.choice(np.arange(lo, hi + 1), size=k, replace=False))
    A, cols = _adjacency_vectors(cfg, seed, alphas)
    return _nodal_rows(A, cols, cfg["params"]["zero_tol"])


def _nodal_stats(rows) -> dict:
    return {
        "two_domains": frequency(r["domain_count"] == 2 for r in rows),
        "balance_at_least_0.6": frequency(r["balance"] >= 0.6 for r in rows),
        "balance_at_most_0.6": frequency(r["balance"] <= 0.6 for r in rows),
        "zero_free": frequency(r["zero_count"] == 0 for r in rows),
        "balance": describe(r["balance"] for r in rows),
    }


def bulk_aggregate(rows, cfg) -> tuple:
    agg = _nodal_stats(rows)
    value = agg["balance_at_least_0.6"]["value"]
    return agg, [Check("freq balance >= 0.6", value, cfg["thresholds"]["balance_exceed_freq"], "<=")]


def two_domain_aggregate(rows, cfg) -> tuple:
    agg = _nodal_stats(rows)
    th = cfg["thresholds"]
    return agg, [
        Check("freq exactly two domains", agg["two_domains"]["value"], th["two_domains_freq"], ">="),
        Check("freq balance <= 0.6", agg["balance_at_most_0.6"]["value"], th["balanced_freq"], ">="),
        Check("freq no zero coordinates", agg["zero_free"]["value"], th["zero_free_freq"], ">="),
    ]


NODAL_COLUMNS = ("trial", "seed", "alpha", "domain_count", "balance", "zero_count")
NODAL_PARAMS = {"indices_per_trial": 10, "zero_tol": nodal.DEFAULT_ZERO_TOL}

register(Experiment(
    "verify-bulk-balance", "balance of bulk eigenvector sign patterns", bulk_trial, bulk_aggregate,
    NODAL_COLUMNS, 1000, 100, {"balance_exceed_freq": 0.05}, dict(NODAL_PARAMS),
))
register(Experiment(
    "two-domains", "bulk eigenvectors have exactly two nodal domains", bulk_trial, two_domain_aggregate,
    NODAL_COLUMNS, 1000, 100,
    {"two_domains_freq": 0.95, "balanced_freq": 0.95, "zero_free_freq": 0.99}, dict(NODAL_PARAMS),
))


def default_edge_indices(n: int) -> tuple:
    """``2, ..., ceil(phi_n)``, capped at ``n``."""
    return tuple(range(2, min(n, math.ceil(phi_n(n))) + 1))


def edge_balance_trial(cfg: dict, t: int, seed: int) -> list:
    A, cols = _adjacency_vectors(cfg, seed, cfg["edge_indices"])
    return _nodal_rows(A, cols, cfg["params"]["zero_tol"])


def edge_balance_aggregate(rows, cfg) -> tuple:
    by_alpha = {}
    for r in rows:
        by_alpha.setdefault(str(r["alpha"]), []).append(r["balance"])
    agg = {
        "balance": describe(r["balance"] for r in rows),
        "two_domains": frequency(r["domain_count"] == 2 for r in rows),
        "balance_by_alpha": {a: describe(v) for a, v in sorted(by_alpha.items(), key=lambda kv: int(kv[0]))},
    }
    return agg, []


register(Experiment(
    "verify-edge-balance", "balance distribution of edge eigenvectors (reported, not asserted)",
    edge_balance_trial, edge_balance_aggregate, NODAL_COLUMNS, 1000, 20, {},
    {"zero_tol": nodal.DEFAULT_ZERO_TOL}, edge_indices=default_edge_indices,
))


# ---------------------------------------------------------------------------
# moments of eigenvector projections


def gaussian_square_moment(k: int) -> int:
    """``E g^(2k) = (2k-1)!!``."""
    return math.prod(range(2 * k - 1, 0, -2)) if k else 1


def _as_poly(f) -> Polynomial:
    if isinstance(f, Polynomial):
        return f
    return Polynomial(np.asarray(f, dtype=np.float64))


def _bhy_direction(cfg: dict) -> np.ndarray:
    n = cfg["n"]
    q = cfg["params"].get("q")
    if q is None:
        q = np.zeros(n)
        q[0], q[1] = 1.0, -1.0
    q = np.asarray(q, dtype=np.float64)
    q = q / np.linalg.norm(q)
    if abs(q.sum()) / math.sqrt(n) > 1e-10:
        raise ConfigurationError("q must be orthogonal to the equal-coordinates direction")
    return q


def bhy_trial(cfg: dict, t: int, seed: int) -> list:
    n = cfg["n"]
    q = _bhy_direction(cfg)
    j = int(cfg["params"]["index"]) or n // 2
    A = sample_gnp(n, cfg["p"], seed)
    _, vec = eigh(A.as_float(), subset_by_index=[n - j, n - j])
    v = vec[:, 0]
    row = {"index": j, "x": n * float(q @ v) ** 2}
    if cfg["params"].get("pair_average") and cfg["params"].get("q") is None:
        # the law of G(n,p) is invariant under vertex relabelling, so every
        # disjoint pair (2k, 2k+1) gives a copy of n<q,v>^2 with the same law
        xs = n * (v[0 : n - 1 : 2] - v[1::2]) ** 2 / 2
        row.update({f"m{k}": float(np.mean(xs**k)) for k in (1, 2, 3)})
    return [row]


def bhy_moment_gap(rows, f) -> dict:
    """``|mean f(x) - E f(g^2)|`` over rows with ``x = n <q, v_j>^2``.

    Rows carrying pair-averaged power means ``m1..m3`` contribute
    ``sum c_k m_k`` instead of ``f(x)``; the standard error is still taken
    across trials.
    """
    P = _as_poly(f)
    target = sum(float(c) * gaussian_square_moment(k) for k, c in enumerate(P.coef))
    if rows and "m1" in rows[0] and P.degree() <= 3:
        coef = np.zeros(4)
        coef[: P.degree() + 1] = P.coef
        vals = np.array([coef[0] + sum(coef[k] * r[f"m{k}"] for k in (1, 2, 3)) for r in rows])
    else:
        vals = P(np.array([r["x"] for r in rows], dtype=np.float64))
    if np.ptp(vals) == 0:
        return {"gap": abs(float(vals[0]) - target), "se": 0.0, "mean": float(vals[0]), "target": target}
    se = float(vals.std(ddof=1) / math.sqrt(vals.size))
    return {"gap": abs(float(vals.mean()) - target), "se": se, "mean": float(vals.mean()), "target": target}


def bhy_aggregate(rows, cfg) -> tuple:
    th = cfg["thresholds"]
    first = bhy_moment_gap(rows, [0, 1])
    second = bhy_moment_gap(rows, [0, 0, 1])
    return {"first_moment": first, "second_moment": second}, [
        Check("|mean n<q,v>^2 - 1|", first["gap"], th["first_moment_gap"], "<="),
        Check("|mean (n<q,v>^2)^2 - 3|", second["gap"], th["second_moment_gap"], "<="),
    ]


register(Experiment(
    "bhy-moments", "moments of n<q,v_j>^2 against Gaussian moments", bhy_trial, bhy_aggregate,
    ("trial", "seed", "index", "x", "m1", "m2", "m3"), 2000, 200,
    {"first_moment_gap": 0.1, "second_moment_gap": 0.5}, {"index": 0, "pair_average": True},
))


# ---------------------------------------------------------------------------
# typicality and level repulsion


def typicality_trial(cfg: dict, t: int, seed: int) -> list:
    A = sample_gnp(cfg["n"], cfg["p"], seed)
    pm = dict(cfg["params"])
    if pm.pop("calibrated", False):
        pm = {**calibrated_constants(), **pm}
    pm["seed"] = seed
    params = TypicalityParams.from_mapping(pm)
    H = centered_wigner(A, cfg["p"])
    if params.variant == "shifted":
        strength = rank_one_strength(cfg["n"], cfg["p"])
        H = SymmetricMatrix(H.entries + strength / cfg["n"])
        params = TypicalityParams.from_mapping({**pm, "seed": seed, "shift_strength": strength})
    rep = typicality_check(H, params)
    row = rep.csv_row()
    row.pop("n")
    row.pop("variant")
    row.update({f"flag_{k}": v for k, v in sorted(rep.flags.items())})
    return [row]


def typicality_aggregate(rows, cfg) -> tuple:
    flags = sorted(k for k in rows[0] if k.startswith("flag_")) if rows else []
    agg = {k: frequency(r[k] for r in rows) for k in flags}
    agg["typical"] = frequency(r["passed"] for r in rows)
    for k in ("isotropic_law_residual", "rigidity_max", "linf_max", "isotropic_overlap", "minor_closeness_max"):
        agg[k] = describe(r[k] for r in rows)
    return agg, [Check("freq typical", agg["typical"]["value"], cfg["thresholds"]["typical_freq"], ">=")]


def _typicality_columns():
    base = ["trial", "seed", "isotropic_law_residual", "rigidity_max", "linf_max", "isotropic_overlap",
            "min_edge_gap", "leading_eigenvalue", "minor_interlacing_violation", "minor_closeness_max",
            "minors_checked", "passed"]
    flags = ["isotropic_law", "isotropic_overlap", "level_repulsion", "linf", "minor_closeness",
             "minor_interlacing", "rigidity"]
    return tuple(base + [f"flag_{f}" for f in flags])


register(Experiment(
    "typicality", "typicality conditions on centered G(n,p) matrices", typicality_trial, typicality_aggregate,
    _typicality_columns(), 1000, 20, {"typical_freq": 0.9}, {"minor_samples": 4, "calibrated": True},
))


def _edge_matrix(cfg: dict, seed: int) -> SymmetricMatrix:
    if cfg["params"].get("ensemble", "gnp") == "goe":
        return sample_goe(cfg["n"], seed)
    return centered_wigner(sample_gnp(cfg["n"], cfg["p"], seed), cfg["p"])


def level_repulsion_trial(cfg: dict, t: int, seed: int) -> list:
    S = _edge_matrix(cfg, seed)
    n = S.n
    lam = np.linalg.eigvalsh(S.entries)[::-1]
    w = n ** (-2.0 / 3.0 + float(cfg["params"]["window_exponent"]))
    gap = level_repulsion_min_gap(lam, w)
    return [{"window": w, "in_window": int(np.sum(np.abs(lam - 2.0) <= w)), "min_gap": gap}]


def level_repulsion_aggregate(rows, cfg) -> tuple:
    f, chk = _freq_check("freq min gap >= bound", (r["min_gap"] >= cfg["thresholds"]["min_gap"] for r in rows),
                         cfg["thresholds"]["freq"])
    return {"min_gap_ok": f, "in_window": describe(r["in_window"] for r in rows)}, [chk]


register(Experiment(
    "level-repulsion", "smallest eigenvalue gap near the spectral edge", level_repulsion_trial,
    level_repulsion_aggregate, ("trial", "seed", "window", "in_window", "min_gap"), 1000, 50,
    {"min_gap": lambda n: n ** (-2.0 / 3.0 - 0.1), "freq": 0.9},
    {"window_exponent": 0.15, "ensemble": "gnp"},
))


# ---------------------------------------------------------------------------
# block detection machinery


def detection_trial(cfg: dict, t: int, seed: int) -> list:
    S = sample_goe(cfg["n"], seed)
    rep = edge.detection_report(S)
    return [{
        "max_root_error": rep.max_root_error,
        "min_cosine": rep.reconstruction_min_cosine,
        "sign_checked": len(rep.signs_formula),
        "degenerate": rep.degenerate_count,
        "sign_mismatches": rep.sign_mismatches,
    }]


def detection_aggregate(rows, cfg) -> tuple:
    th = cfg["thresholds"]
    ok = [
        r["max_root_error"] <= th["root_tol"] and r["min_cosine"] >= 1.0 - th["cosine_tol"] and r["sign_mismatches"] == 0
        for r in rows
    ]
    f, chk = _freq_check("freq oracle match", ok, th["freq"])
    agg = {"oracle_match": f, "max_root_error": max(r["max_root_error"] for r in rows),
           "min_cosine": min(r["min_cosine"] for r in rows),
           "degenerate": sum(r["degenerate"] for r in rows), "sign_mismatches": sum(r["sign_mismatches"] for r in rows)}
    return agg, [chk]


register(Experiment(
    "detection-consistency", "2x2 block detection against a direct eigensolver", detection_trial,
    detection_aggregate, ("trial", "seed", "max_root_error", "min_cosine", "sign_checked", "degenerate",
                          "sign_mismatches"), 50, 100, {"root_tol": 1e-8, "cosine_tol": 1e-10, "freq": 1.0},
))


def sticking_trial(cfg: dict, t: int, seed: int) -> list:
    n = cfg["n"]
    H = centered_wigner(sample_gnp(n, cfg["p"], seed), cfg["p"])
    prob = edge.SecularProblem(eigendecompose(H), np.full(n, 1.0 / math.sqrt(n)), rank_one_strength(n, cfg["p"]))
    spec = edge.secular_eigenvalues(prob)
    rows = []
    for beta in cfg["edge_indices"]:
        r = edge.sticking_report(prob, beta, spec)
        rows.append({"beta": beta, "gap": r["gap"], "overlap_ratio": r["overlap_ratio"]})
    return rows


def sticking_aggregate(rows, cfg) -> tuple:
    th = cfg["thresholds"]
    g, c1 = _freq_check("freq 0 <= gap <= bound", (0.0 <= r["gap"] <= th["gap"] for r in rows), th["freq"])
    q, c2 = _freq_check(
        "freq overlap ratio in range",
        (th["ratio_low"] <= r["overlap_ratio"] <= th["ratio_high"] for r in rows), th["freq"],
    )
    return {"gap_ok": g, "ratio_ok": q, "gap": describe(r["gap"] for r in rows),
            "overlap_ratio": describe(r["overlap_ratio"] for r in rows)}, [c1, c2]


register(Experiment(
    "sticking", "rank-one shifted eigenvalues stick to the unshifted ones", sticking_trial, sticking_aggregate,
    ("trial", "seed", "beta", "gap", "overlap_ratio"), 1000, 50,
    {"gap": lambda n: n ** -0.8, "ratio_low": 0.5, "ratio_high": 1.5, "freq": 0.9}, {}, edge_indices=lambda n: (2,),
))


def wgw_trial(cfg: dict, t: int, seed: int) -> list:
    H = centered_wigner(sample_gnp(cfg["n"], cfg["p"], seed), cfg["p"])
    sys = edge.DetectionSystem.from_matrix(H)
    lam = np.linalg.eigvalsh(H.entries)[::-1]
    rows = []
    for alpha in cfg["edge_indices"]:
        E = float(lam[alpha - 1])
        r = {f"r{i}{j}": edge.wgw_residual(sys, E, i, j) for i, j in ((1, 1), (1, 2), (2, 2))}
        rows.append({"alpha": alpha, "E": E, **r, "residual": max(abs(v) for v in r.values())})
    return rows


def wgw_aggregate(rows, cfg) -> tuple:
    th = cfg["thresholds"]
    f, chk = _freq_check("freq residual <= bound", (r["residual"] <= th["residual"] for r in rows), th["freq"])
    return {"residual_ok": f, "residual": describe(r["residual"] for r in rows)}, [chk]


register(Experiment(
    "wgw", "concentration of w^T G(E) w at an edge eigenvalue", wgw_trial, wgw_aggregate,
    ("trial", "seed", "alpha", "E", "r11", "r12", "r22", "residual"), 1000, 50,
    {"residual": lambda n: n ** (-1.0 / 3.0 + 0.2), "freq": 0.9}, {}, edge_indices=lambda n: (1,),
))


def sign_probability_trial(cfg: dict, t: int, seed: int) -> list:
    H = centered_wigner(sample_gnp(cfg["n"], cfg["p"], seed), cfg["p"])
    blocks = block_decompose(H)
    b_spec = eigendecompose(blocks.B)
    pm = cfg["params"]
    rows = []
    for alpha in cfg["edge_indices"]:
        single = edge.pair_sign_probability(b_spec, alpha, pm["resamples"], (seed, alpha, 0), law=pm["law"], p=cfg["p"])
        prod = edge.pair_sign_probability(b_spec, alpha, pm["resamples"], (seed, alpha, 1), law=pm["law"], p=cfg["p"],
                                          product=True)
        rows.append({
            "alpha": alpha, "value": single["value"], "se": single["se"], "zeros": single["zeros"],
            "berry_esseen": single["berry_esseen"], "product_value": prod["value"], "product_se": prod["se"],
        })
    return rows


def sign_probability_aggregate(rows, cfg) -> tuple:
    th = cfg["thresholds"]
    dev = max(abs(r["value"] - 0.5) for r in rows)
    return {"max_deviation": dev, "product": describe(r["product_value"] for r in rows),
            "value": describe(r["value"] for r in rows)}, [Check("max |P - 1/2|", dev, th["tolerance"], "<=")]


register(Experiment(
    "sign-probability", "P(<w, u_alpha> > 0) for resampled coupling columns", sign_probability_trial,
    sign_probability_aggregate,
    ("trial", "seed", "alpha", "value", "se", "zeros", "berry_esseen", "product_value", "product_se"),
    1000, 5, {"tolerance": 0.05}, {"resamples": 10000, "law": "bernoulli"}, edge_indices=lambda n: (1,),
))


# ---------------------------------------------------------------------------
# sign polynomials


def signpoly_trial(cfg: dict, t: int, seed: int) -> list:
    pm = cfg["params"]
    h = signpoly.smoothed_sign(float(pm["r"]))
    rows = []
    for d in range(1, int(pm["max_degree"]) + 1, 2):
        Q = signpoly.project_odd(h, d, sup_range=(float(pm["r"]), float(pm["R"])))
        orth = signpoly.residual_orthogonality(h, Q)
        rows.append({
            "degree": d,
            "basis": Q.h_params["basis"],
            "sobolev": Q.errors["sobolev"],
            "sup": Q.errors["sup"],
            "l2mu": Q.errors["l2mu"],
            "orthogonality": float(np.abs(orth["normalized_monomials"]).max()),
            "product_mean": signpoly.gauss_product_expectation(Q, order=max(80, d + 6), degree=d),
        })
    return rows


def signpoly_aggregate(rows, cfg) -> tuple:
    th = cfg["thresholds"]
    sob = [r["sobolev"] for r in sorted(rows, key=lambda r: r["degree"])]
    # non-increasing up to rounding of the Pythagorean difference
    increases = max([b - a for a, b in zip(sob, sob[1:])] + [0.0])
    by_deg = {r["degree"]: r for r in rows}
    target = int(th["target_degree"])
    reach = [r["degree"] for r in rows if r["sup"] <= th["sup"]]
    agg = {
        "max_orthogonality": max(r["orthogonality"] for r in rows),
        "max_sobolev_increase": increases,
        "sup_at_target": by_deg[target]["sup"] if target in by_deg else math.nan,
        "first_degree_reaching_sup": min(reach) if reach else None,
        "max_abs_product_mean": max(abs(r["product_mean"]) for r in rows),
    }
    return agg, [
        Check("max H-orthogonality residual", agg["max_orthogonality"], th["orthogonality"], "<="),
        Check("max sobolev error increase", increases, th["monotone_slack"], "<="),
        Check(f"sup error at degree {target}", agg["sup_at_target"], th["sup"], "<="),
        Check("min sup error up to the degree cap", min(r["sup"] for r in rows), th["sup"], "<="),
        Check("max |E Q(g1 g2)|", agg["max_abs_product_mean"], th["product_mean"], "<="),
    ]


register(Experiment(
    "signpoly-report", "odd polynomial approximation of a smoothed sign", signpoly_trial, signpoly_aggregate,
    ("trial", "seed", "degree", "basis", "sobolev", "sup", "l2mu", "orthogonality", "product_mean"), 2, 1,
    {"orthogonality": 1e-8, "monotone_slack": 1e-12, "sup": 0.1, "target_degree": 41, "product_mean": 1e-10},
    {"r": 0.1, "R": 10.0, "max_degree": 61}, single_trial=True,
))


# ---------------------------------------------------------------------------
# Green function comparison


def green_trial(cfg: dict, t: int, seed: int) -> list:
    n = cfg["n"]
    pm = cfg["params"]
    stat = greenlaw.ComparisonStatistic.at_edge(n, float(pm["eps"]), pm["F"])
    a = stat.value(np.linalg.eigvalsh(greenlaw.ENSEMBLES[pm["ensemble_a"]](n, seed).entries))
    b = stat.value(np.linalg.eigvalsh(greenlaw.ENSEMBLES[pm["ensemble_b"]](n, seed).entries))
    return [{"stat_a": a, "stat_b": b}]


def green_aggregate(rows, cfg) -> tuple:
    a = np.array([r["stat_a"] for r in rows])
    b = np.array([r["stat_b"] for r in rows])
    k = a.size
    gap = float(abs(a.mean() - b.mean()))
    se = float((a - b).std(ddof=1) / math.sqrt(k)) if k > 1 else math.nan
    bound = max(3.0 * se, cfg["thresholds"]["envelope"]) if k > 1 else cfg["thresholds"]["envelope"]
    agg = {"gap": gap, "se": se, "mean_a": float(a.mean()), "mean_b": float(b.mean()), "bound": bound}
    return agg, [Check("Lindeberg gap", gap, bound, "<=")]


register(Experiment(
    "green-comparison", "edge counting statistic under GOE with and without diagonal", green_trial,
    green_aggregate, ("trial", "seed", "stat_a", "stat_b"), 300, 1000,
    {"envelope": lambda n: n ** (-1.0 / 3.0 + 0.3)},
    {"eps": greenlaw.SWEEP_EPS, "F": "logistic", "ensemble_a": "goe", "ensemble_b": "goe_zero_diagonal"},
))


def sweep_trial(cfg: dict, t: int, seed: int) -> list:
    n = cfg["n"]
    stride = int(cfg["params"]["beta_stride"])
    res = greenlaw.sweep_trial(n, seed, eps=float(cfg["params"]["eps"]), betas=range(0, n + 1, stride))
    growth = {(g["beta"], g["gamma"]): g["factor"] for g in res.growth}
    return [{**{k: r[k] for k in ("beta", "gamma", "E", "residual")},
             "growth": growth.get((r["beta"], r["gamma"]), math.nan)} for r in res.rows]


def sweep_aggregate(rows, cfg) -> tuple:
    th = cfg["thresholds"]
    f, c1 = _freq_check("freq residual <= bound", (r["residual"] <= th["residual"] for r in rows), th["freq"])
    grow = [r["growth"] for r in rows if not math.isnan(r["growth"])]
    g, c2 = _freq_check("freq growth factor <= bound", (x <= th["growth"] for x in grow), th["growth_freq"])
    return {"residual_ok": f, "growth_ok": g, "residual": describe(r["residual"] for r in rows)}, [c1, c2]


register(Experiment(
    "interpolation-sweep", "local-law residuals along the diagonal interpolation path", sweep_trial,
    sweep_aggregate, ("trial", "seed", "beta", "gamma", "E", "residual", "growth"), 300, 1,
    {"residual": lambda n: n ** (-1.0 / 3.0 + 4 * greenlaw.SWEEP_EPS), "freq": 0.9,
     "growth": lambda n: 1.0 + 10.0 / (phi_n(n) * n), "growth_freq": 0.95},
    {"eps": greenlaw.SWEEP_EPS, "beta_stride": 1}, max_n=greenlaw.SWEEP_MAX_N,
))
