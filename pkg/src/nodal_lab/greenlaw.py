"""Resolvent perturbation, local-law sweeps along the diagonal interpolation
path, and the Lindeberg comparison statistic."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from ._rng import trial_seed
from .deloc import phi_n
from .ensembles import SymmetricMatrix, lindeberg_increments, lindeberg_matrix, sample_goe
from .errors import ConfigurationError, DomainError
from .spectral import eigendecompose, semicircle_stieltjes

SWEEP_EPS = 0.075
SWEEP_MAX_N = 400


# ---------------------------------------------------------------------------
# rank-one resolvent expansion


def _check_z(z) -> complex:
    z = complex(z)
    if not z.imag != 0.0:
        raise DomainError(f"spectral parameter must be off the real axis, got {z}")
    return z


def resolvent(a: np.ndarray, z) -> np.ndarray:
    z = _check_z(z)
    a = np.asarray(a)
    return np.linalg.inv(a - z * np.eye(a.shape[0]))


def rank_one_update(R: np.ndarray, h: float, pivot: int) -> np.ndarray:
    """Exact Green function of ``A + h e e^T`` from ``R`` (Sherman-Morrison)."""
    col = R[:, pivot]
    return R - (h / (1.0 + h * R[pivot, pivot])) * np.outer(col, R[pivot, :])


def resolvent_rank_one_expand(R: np.ndarray, h: float, k: int, pivot: int, z, remainder: bool = False) -> np.ndarray:
    """Order-``k`` expansion of the Green function of ``A + h e_pivot e_pivot^T``.

    ``S_ij ~ R_ij - h R_ip R_pj sum_{l=0}^{k} (-h R_pp)^l``.  With
    ``remainder=True`` the exact tail ``-h R_ip (-h R_pp)^(k+1) S_pj`` is
    added, which reproduces ``S`` up to rounding.
    """
    _check_z(z)
    if k < 1:
        raise ConfigurationError(f"expansion order must be >= 1, got {k}")
    R = np.asarray(R, dtype=np.complex128)
    q = -h * R[pivot, pivot]
    series = sum(q**l for l in range(k + 1))
    S = R - h * series * np.outer(R[:, pivot], R[pivot, :])
    if remainder:
        exact_row = R[pivot, :] / (1.0 + h * R[pivot, pivot])
        S = S - h * q ** (k + 1) * np.outer(R[:, pivot], exact_row)
    return S


def resolvent_identity_residual(a: np.ndarray, b: np.ndarray, z) -> float:
    """``max |(A+B-z)^-1 - [R - R B (A+B-z)^-1]|`` relative to ``max |R|``."""
    R = resolvent(a, z)
    S = resolvent(np.asarray(a) + np.asarray(b), z)
    return float(np.abs(S - (R - R @ b @ S)).max() / np.abs(R).max())


# ---------------------------------------------------------------------------
# interpolation-path sweep


def sweep_energies(n: int, eps: float = SWEEP_EPS, points: int = 9) -> np.ndarray:
    half = float(n) ** (-2.0 / 3.0 + eps)
    return 2.0 + np.linspace(-half, half, points)


def sweep_eta(n: int, eps: float = SWEEP_EPS) -> float:
    return float(n) ** (-2.0 / 3.0 - 2.0 * eps)


def green_residual(S: SymmetricMatrix, energies: np.ndarray, eta: float) -> tuple[float, float]:
    """``max_E max_ij |G_ij(E + i eta) - delta_ij m_sc(E + i eta)|`` and the arg-max energy."""
    spec = eigendecompose(S)
    v, lam = spec.eigenvectors, spec.eigenvalues
    best, best_E = -1.0, float("nan")
    for E in energies:
        z = complex(E, eta)
        d = 1.0 / (lam - z)
        re = (v * d.real) @ v.T
        im = (v * d.imag) @ v.T
        m = semicircle_stieltjes(z)
        re[np.diag_indices_from(re)] -= m.real
        im[np.diag_indices_from(im)] -= m.imag
        r = float(np.sqrt(re * re + im * im).max())
        if r > best:
            best, best_E = r, float(E)
    return best, best_E


@dataclass
class SweepResult:
    n: int
    eps: float
    threshold: float
    growth_limit: float
    rows: list = field(default_factory=list)
    growth: list = field(default_factory=list)

    CSV_FIELDS = ("n", "beta", "gamma", "E", "residual")

    @property
    def max_residual(self) -> float:
        return max(r["residual"] for r in self.rows)

    @property
    def pass_fraction(self) -> float:
        return float(np.mean([r["residual"] <= self.threshold for r in self.rows]))

    @property
    def growth_fraction(self) -> float:
        if not self.growth:
            return float("nan")
        return float(np.mean([g["factor"] <= self.growth_limit for g in self.growth]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: (repr(r[k]) if isinstance(r[k], float) else r[k]) for k in self.CSV_FIELDS})
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "n": self.n,
            "eps": self.eps,
            "threshold": self.threshold,
            "max_residual": self.max_residual,
            "pass_fraction": self.pass_fraction,
            "points": len(self.rows),
            "growth_limit": self.growth_limit,
            "growth_fraction": self.growth_fraction,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


def path_checkpoints(n: int) -> list[int]:
    return sorted({0, n // 4, n // 2, (3 * n) // 4, n})


def interpolation_local_law_sweep(
    base: SymmetricMatrix,
    increments: np.ndarray,
    energies: np.ndarray | None = None,
    *,
    eps: float = SWEEP_EPS,
    betas=None,
    gammas=None,
    growth: bool = True,
) -> SweepResult:
    """Local-law residuals of ``W_{beta,gamma}`` at path checkpoints.

    ``betas`` defaults to all of ``0..n-1`` and ``gammas`` to the five
    checkpoints.  With ``growth`` each ``gamma < n`` is paired with
    ``gamma + 1`` to record the one-step growth factor.
    """
    n = base.n
    if n > SWEEP_MAX_N:
        raise ConfigurationError(f"sweep capped at n={SWEEP_MAX_N}, got {n}")
    energies = sweep_energies(n, eps) if energies is None else np.asarray(energies, dtype=np.float64)
    eta = sweep_eta(n, eps)
    betas = range(n) if betas is None else betas
    gammas = path_checkpoints(n) if gammas is None else gammas
    out = SweepResult(
        n=n,
        eps=eps,
        threshold=float(n) ** (-1.0 / 3.0 + 4.0 * eps),
        growth_limit=1.0 + 10.0 / (phi_n(n) * n),
    )
    for beta in betas:
        for gamma in gammas:
            if beta == n and gamma > 0:
                continue
            res, E = green_residual(lindeberg_matrix(base, increments, beta, gamma), energies, eta)
            out.rows.append({"n": n, "beta": int(beta), "gamma": int(gamma), "E": E, "residual": res})
            if growth and gamma < n and beta < n:
                nxt, _ = green_residual(lindeberg_matrix(base, increments, beta, gamma + 1), energies, eta)
                out.growth.append({"beta": int(beta), "gamma": int(gamma), "factor": nxt / res})
    return out


def sweep_trial(n: int, seed: int, **kw) -> SweepResult:
    base = sample_goe(n, (seed, 0), zero_diagonal=True)
    inc = lindeberg_increments(n, (seed, 1))
    return interpolation_local_law_sweep(base, inc, **kw)


# ---------------------------------------------------------------------------
# comparison statistic


def _logistic(x):
    return 1.0 / (1.0 + np.exp(-x))


def _bump(x):
    return np.exp(-0.5 * np.square(x))


def _cubic_cap(x):
    t = np.clip(np.asarray(x, dtype=np.float64) / 4.0, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


# sup norms of F, F', F''
TEST_FUNCTIONS = {
    "logistic": (_logistic, (1.0, 0.25, 1.0 / (6.0 * math.sqrt(3.0)))),
    "gaussian_bump": (_bump, (1.0, math.exp(-0.5), 1.0)),
    "cubic_cap": (_cubic_cap, (1.0, 3.0 / 8.0, 3.0 / 8.0)),
}


def integrated_density(eigenvalues: np.ndarray, E1: float, E2: float, eta: float, method: str = "closed") -> float:
    """``n * int_{E1}^{E2} Im m(y + i eta) dy``.

    ``"closed"`` sums arctangent differences, ``"quad"`` uses adaptive
    quadrature and ``"grid"`` a fixed composite Simpson rule.
    """
    if not eta > 0:
        raise DomainError(f"eta must be positive, got {eta}")
    lam = np.asarray(eigenvalues, dtype=np.float64)
    if method == "closed":
        return float(np.sum(np.arctan((E2 - lam) / eta) - np.arctan((E1 - lam) / eta)))

    def im_nm(y):
        return float(np.sum(eta / ((lam - y) ** 2 + eta * eta)))

    if method == "quad":
        pts = lam[(lam > E1) & (lam < E2)]
        val, _ = integrate.quad(im_nm, E1, E2, points=pts if pts.size else None, limit=500, epsabs=1e-12, epsrel=1e-12)
        return float(val)
    if method.startswith("grid"):
        m = int(method.split(":")[1]) if ":" in method else 20001
        y = np.linspace(E1, E2, m | 1)
        vals = np.sum(eta / ((lam[:, None] - y[None, :]) ** 2 + eta * eta), axis=0)
        return float(integrate.simpson(vals, x=y))
    raise ConfigurationError(f"unknown method {method!r}")


@dataclass(frozen=True)
class ComparisonStatistic:
    """``F(n int_{E1}^{E2} Im m(y + i eta) dy)`` with ``F`` from a fixed catalog."""

    E1: float
    E2: float
    eta: float
    F: str = "logistic"

    def __post_init__(self):
        if self.F not in TEST_FUNCTIONS:
            raise ConfigurationError(f"unknown test function {self.F!r}; choose from {sorted(TEST_FUNCTIONS)}")
        if not self.eta > 0:
            raise DomainError(f"eta must be positive, got {self.eta}")

    @classmethod
    def at_edge(cls, n: int, eps: float = SWEEP_EPS, F: str = "logistic") -> "ComparisonStatistic":
        half = float(n) ** (-2.0 / 3.0 + eps)
        return cls(2.0 - half, 2.0 + half, float(n) ** (-2.0 / 3.0 - eps), F)

    @property
    def derivative_bounds(self) -> tuple:
        return TEST_FUNCTIONS[self.F][1]

    def value(self, eigenvalues: np.ndarray) -> float:
        fn = TEST_FUNCTIONS[self.F][0]
        return float(fn(integrated_density(eigenvalues, self.E1, self.E2, self.eta)))


ENSEMBLES = {
    "goe": lambda n, seed: sample_goe(n, seed),
    "goe_zero_diagonal": lambda n, seed: sample_goe(n, seed, zero_diagonal=True),
}


@dataclass
class GapResult:
    gap: float
    se: float
    se_a: float
    se_b: float
    mean_a: float
    mean_b: float
    trials: int
    envelope: float

    def to_dict(self) -> dict:
        return asdict(self)


def statistic_samples(stat: ComparisonStatistic, ensemble: str, n: int, trials: int, seed: int) -> np.ndarray:
    if ensemble not in ENSEMBLES:
        raise ConfigurationError(f"unknown ensemble {ensemble!r}")
    make = ENSEMBLES[ensemble]
    out = np.empty(trials)
    for t in range(trials):
        S = make(n, trial_seed(seed, t))
        out[t] = stat.value(np.linalg.eigvalsh(S.entries))
    return out


def lindeberg_gap(stat: ComparisonStatistic, ensemble_a: str, ensemble_b: str, n: int, trials: int, seed: int,
                  envelope_const: float = 1.0, eps: float = SWEEP_EPS) -> GapResult:
    """Difference of the statistic's means under two ensembles.

    Trial ``t`` uses the same seed for both ensembles, so GOE samples with
    and without diagonal share their off-diagonal entries and the paired
    standard error is reported.
    """
    a = statistic_samples(stat, ensemble_a, n, trials, seed)
    b = statistic_samples(stat, ensemble_b, n, trials, seed)
    d = a - b
    root = math.sqrt(trials)
    return GapResult(
        gap=float(abs(a.mean() - b.mean())),
        se=float(d.std(ddof=1) / root) if trials > 1 else float("nan"),
        se_a=float(a.std(ddof=1) / root) if trials > 1 else float("nan"),
        se_b=float(b.std(ddof=1) / root) if trials > 1 else float("nan"),
        mean_a=float(a.mean()),
        mean_b=float(b.mean()),
        trials=trials,
        envelope=envelope_const * float(n) ** (-1.0 / 3.0 + 4.0 * eps),
    )
