"""Delocalization, rigidity and level-repulsion diagnostics, assembled into
typicality reports for Wigner-type matrices and their rank-one shifts."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from importlib import resources

import numpy as np

from ._rng import make_rng
from .ensembles import SymmetricMatrix
from .errors import ConfigurationError, DataError
from .spectral import (
    DEFAULT_EPS_LR,
    Spectrum,
    classical_locations,
    default_eta,
    eigendecompose,
    semicircle_stieltjes,
)


def phi_n(n: float) -> float:
    """Polylogarithmic allowance ``(log n)^(log log n)``."""
    ln = math.log(n)
    return ln ** math.log(ln)


def linf_deloc(spec: Spectrum) -> np.ndarray:
    """``sqrt(n) * max_i |v_alpha(i)|`` for every eigenvector."""
    return math.sqrt(spec.n) * np.abs(spec.eigenvectors).max(axis=0)


def _subset_size(fraction: float, n: int) -> int:
    if not 0.0 < fraction <= 1.0:
        raise ConfigurationError(f"fraction must lie in (0, 1], got {fraction}")
    # round away representation noise such as 0.07 * 100 = 7.000000000000001
    return min(n, math.ceil(round(fraction * n, 9)))


def no_gaps_mass(v: np.ndarray, fraction: float) -> float:
    """Smallest squared mass carried by any ``ceil(fraction * n)`` coordinates."""
    v = np.asarray(v, dtype=np.float64)
    k = _subset_size(fraction, v.size)
    sq = v * v
    return float(np.sort(np.partition(sq, k - 1)[:k]).sum())


def isotropic_overlap(spec: Spectrum, l: np.ndarray, indices=None) -> float:
    """``max_alpha n <v_alpha, l>^2``, optionally over 1-based ``indices`` only."""
    l = np.asarray(l, dtype=np.float64)
    if l.shape != (spec.n,):
        raise DataError(f"direction has length {l.size}, expected {spec.n}")
    ov = spec.overlaps(l) ** 2 * spec.n
    if indices is not None:
        ov = ov[np.asarray(indices, dtype=np.int64) - 1]
    return float(ov.max()) if ov.size else 0.0


def rigidity_residuals(spec: Spectrum, shift: int = 0) -> np.ndarray:
    """``|lambda_{alpha+shift} - gamma_alpha| min(alpha, n-alpha+1)^(1/3) n^(2/3)``.

    ``shift=1`` compares ``mu_{alpha+1}`` with ``gamma_alpha`` for
    ``alpha = 1..n-1``, skipping the outlier of a rank-one shifted matrix.
    """
    n = spec.n
    gamma = classical_locations(n)
    alpha = np.arange(1, n + 1 - shift)
    lam = spec.eigenvalues[shift:]
    scale = np.minimum(alpha, n - alpha + 1) ** (1.0 / 3.0) * n ** (2.0 / 3.0)
    return np.abs(lam - gamma[: n - shift]) * scale


def level_repulsion_min_gap(spec, window_halfwidth: float, center: float = 2.0) -> float:
    """Smallest gap between eigenvalues in ``[center - w, center + w]``.

    ``spec`` is a ``Spectrum`` or a non-increasing eigenvalue array.  Exact
    ties count as gap 0; fewer than two eigenvalues give ``inf``.
    """
    if not window_halfwidth > 0:
        raise ConfigurationError("window half-width must be positive")
    lam = spec.eigenvalues if isinstance(spec, Spectrum) else np.asarray(spec, dtype=np.float64)
    inside = lam[(lam >= center - window_halfwidth) & (lam <= center + window_halfwidth)]
    if inside.size < 2:
        return math.inf
    return float(np.min(-np.diff(inside)))


def edge_energy_grid(n: int, eps_lr: float = DEFAULT_EPS_LR, points: int = 64, exponent: float = 3.0) -> np.ndarray:
    """Equispaced energies on ``|E - 2| <= n^(-2/3 + exponent*eps_lr)``."""
    w = float(n) ** (-2.0 / 3.0 + exponent * eps_lr)
    return np.linspace(2.0 - w, 2.0 + w, points)


def default_directions(n: int, l: np.ndarray | None = None, max_basis: int = 32) -> np.ndarray:
    """Columns ``e_i`` for up to ``max_basis`` evenly spread ``i``, then ``l``."""
    idx = np.unique(np.linspace(0, n - 1, min(n, max_basis)).round().astype(int))
    cols = np.zeros((n, idx.size))
    cols[idx, np.arange(idx.size)] = 1.0
    if l is not None:
        cols = np.column_stack([cols, np.asarray(l, dtype=np.float64)])
    return cols


def isotropic_residual_profile(spec: Spectrum, directions: np.ndarray, energies, eta: float) -> np.ndarray:
    """Per-energy ``max_{x,y} |<x, G(E + i eta) y> - <x, y> m_sc(E + i eta)|``."""
    X = np.asarray(directions, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != spec.n:
        raise DataError(f"directions must be an ({spec.n}, k) array")
    Y = spec.eigenvectors.T @ X
    gram = X.T @ X
    out = np.empty(len(energies))
    for k, E in enumerate(energies):
        z = complex(E, eta)
        G = (Y.T / (spec.eigenvalues - z)) @ Y
        out[k] = np.abs(G - gram * semicircle_stieltjes(z)).max()
    return out


def isotropic_law_residual(spec: Spectrum, energies=None, directions=None, eta=None,
                           eps_lr: float = DEFAULT_EPS_LR, l=None) -> float:
    n = spec.n
    energies = edge_energy_grid(n, eps_lr) if energies is None else energies
    directions = default_directions(n, l) if directions is None else directions
    eta = default_eta(n, eps_lr) if eta is None else eta
    return float(isotropic_residual_profile(spec, directions, energies, eta).max())


# ---------------------------------------------------------------------------
# typicality


@dataclass(frozen=True)
class TypicalityParams:
    """Constants of the typicality conditions; unquantified ones are calibrated.

    ``variant="wigner"`` checks the conditions for a Wigner-type matrix;
    ``variant="shifted"`` checks the rank-one shifted form, which skips the
    outlier in rigidity and adds a leading-eigenvalue condition.
    """

    eps_lr: float = DEFAULT_EPS_LR
    rho: float = 1.0
    C: float = 1.0
    C_re: float = 1.0
    C_ll: float = 3.0
    c_iso: float = 1.0
    iso_const: float = 3.0
    theta: float = 0.5
    k: int = 0
    lr_exponent: float = 3.0
    energy_points: int = 64
    max_directions: int = 32
    variant: str = "wigner"
    shift_strength: float = 0.0
    minor_samples: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.variant not in ("wigner", "shifted"):
            raise ConfigurationError(f"unknown typicality variant {self.variant!r}")
        if self.eps_lr <= 0:
            raise ConfigurationError("eps_lr must be positive")

    @classmethod
    def from_mapping(cls, d: dict) -> "TypicalityParams":
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigurationError(f"unknown typicality parameters: {sorted(unknown)}")
        return cls(**d)

    def thresholds(self, n: int) -> dict:
        e, phi = self.eps_lr, phi_n(n)
        shifted = self.variant == "shifted"
        return {
            "isotropic_law": (n ** (-1 / 3 + self.C_ll * e)) if shifted else self.iso_const * n ** (-1 / 3 + 3 * e),
            "rigidity": phi ** (2 * self.C_re if shifted else self.C_re),
            # sqrt(n) ||v||_inf; the shifted form bounds edge vectors by n^(1/6 + 6 eps)
            "linf": n ** (1 / 6 + 6 * e) if shifted else phi**self.C,
            # n <v, l>^2
            "isotropic_overlap": n ** (-1 + 2 * self.c_iso * e) if shifted else n ** (self.c_iso * e),
            "min_edge_gap": self.theta * n ** (-2 / 3 - e) - self.k * phi**self.C / n,
            "lr_window": n ** (-2 / 3 + self.lr_exponent * e),
            "edge_window": n ** (-2 / 3) * phi ** (2 * self.rho),
            "minor_closeness": phi**self.C / n,
            "leading": 0.5 * self.shift_strength,
        }


CALIBRATION_FILE = "calibration.json"


def calibrated_constants() -> dict:
    """Typicality constants fitted by the recorded calibration run."""
    text = resources.files("nodal_lab").joinpath("data", CALIBRATION_FILE).read_text()
    return dict(json.loads(text)["constants"])


@dataclass
class TypicalityReport:
    n: int
    variant: str
    isotropic_law_residual: float
    rigidity_max: float
    linf_max: float
    isotropic_overlap: float
    min_edge_gap: float
    leading_eigenvalue: float
    minor_interlacing_violation: float = 0.0
    minor_closeness_max: float = 0.0
    minors_checked: int = 0
    flags: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TypicalityReport":
        d = json.loads(text)
        for key in ("min_edge_gap",):
            if d[key] == "inf":
                d[key] = math.inf
        return cls(**d)

    CSV_FIELDS = (
        "n", "variant", "isotropic_law_residual", "rigidity_max", "linf_max",
        "isotropic_overlap", "min_edge_gap", "leading_eigenvalue",
        "minor_interlacing_violation", "minor_closeness_max", "minors_checked", "passed",
    )

    def csv_row(self) -> dict:
        d = {k: getattr(self, k) for k in self.CSV_FIELDS if k != "passed"}
        d["passed"] = self.passed
        return d

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerow(self.csv_row())
        return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def minor_interlacing(S: SymmetricMatrix, remove, parent: Spectrum | None = None) -> dict:
    """Interlacing of a principal minor with its parent.

    Removing ``r`` rows gives ``lambda_i >= mu_i >= lambda_{i+r}``.  Reports the
    largest violation (0 when interlacing holds) and the largest distance
    ``lambda_i - mu_i``.
    """
    remove = np.atleast_1d(remove)
    r = remove.size
    parent = parent or eigendecompose(S)
    lam = parent.eigenvalues
    mu = np.linalg.eigvalsh(S.principal_minor(remove).entries)[::-1]
    upper = mu - lam[: mu.size]
    lower = lam[r:] - mu
    return {
        "violation": float(max(upper.max(), lower.max(), 0.0)),
        "closeness": -upper,
        "minor_eigenvalues": mu,
    }


def typicality_check(S: SymmetricMatrix, params: TypicalityParams | None = None,
                     l: np.ndarray | None = None, spec: Spectrum | None = None) -> TypicalityReport:
    params = params or TypicalityParams()
    n = S.n
    th = params.thresholds(n)
    spec = spec or eigendecompose(S)
    l = np.full(n, 1.0 / math.sqrt(n)) if l is None else np.asarray(l, dtype=np.float64)
    eta = default_eta(n, params.eps_lr)
    shifted = params.variant == "shifted"
    lam = spec.eigenvalues

    if shifted:
        energies = np.linspace(2.0 - th["edge_window"], 2.0 + th["edge_window"], params.energy_points)
        law = _stieltjes_max(spec, energies, eta)
        rig = rigidity_residuals(spec, shift=1)
        edge = np.nonzero(np.abs(lam - 2.0) <= th["edge_window"])[0]
        linf = float(linf_deloc(spec)[edge].max()) if edge.size else 0.0
        overlap = isotropic_overlap(spec, l, edge + 1) if edge.size else 0.0
    else:
        energies = edge_energy_grid(n, params.eps_lr, params.energy_points)
        dirs = default_directions(n, l, params.max_directions)
        law = float(isotropic_residual_profile(spec, dirs, energies, eta).max())
        rig = rigidity_residuals(spec)
        linf = float(linf_deloc(spec).max())
        overlap = isotropic_overlap(spec, l)
    gap = level_repulsion_min_gap(spec, th["lr_window"])

    report = TypicalityReport(
        n=n,
        variant=params.variant,
        isotropic_law_residual=law,
        rigidity_max=float(rig.max()),
        linf_max=linf,
        isotropic_overlap=overlap,
        min_edge_gap=gap,
        leading_eigenvalue=float(lam[0]),
    )
    flags = {
        "isotropic_law": law < th["isotropic_law"],
        "rigidity": report.rigidity_max <= th["rigidity"],
        "linf": linf <= th["linf"],
        "isotropic_overlap": overlap < th["isotropic_overlap"],
        "level_repulsion": gap > th["min_edge_gap"],
    }
    if shifted:
        flags["leading"] = report.leading_eigenvalue >= th["leading"]

    if params.minor_samples:
        rng = make_rng(params.seed)
        worst, close = 0.0, 0.0
        for t in range(params.minor_samples):
            r = 1 + (t % 2)
            remove = np.sort(rng.choice(n, size=r, replace=False))
            res = minor_interlacing(S, remove, spec)
            worst = max(worst, res["violation"])
            mu = res["minor_eigenvalues"]
            in_window = np.abs(mu - 2.0) <= th["edge_window"]
            if in_window.any():
                # removing r rows allows r times the single-row distance
                close = max(close, float(res["closeness"][in_window].max()) / r)
        report.minor_interlacing_violation = worst
        report.minor_closeness_max = close
        report.minors_checked = params.minor_samples
        scale = 1e-12 * (1.0 + float(np.abs(lam).max()))
        flags["minor_interlacing"] = worst <= scale
        flags["minor_closeness"] = close <= th["minor_closeness"]

    report.flags = {k: bool(v) for k, v in flags.items()}
    report.thresholds = {k: float(v) for k, v in th.items()}
    return report


def _stieltjes_max(spec: Spectrum, energies, eta: float) -> float:
    lam = spec.eigenvalues
    z = np.asarray(energies) + 1j * eta
    m = (1.0 / (lam[None, :] - z[:, None])).mean(axis=1)
    msc = np.array([semicircle_stieltjes(zz) for zz in z])
    return float(np.abs(m - msc).max())
