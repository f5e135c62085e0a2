"""Edge machinery for a matrix split as ``[[D, W^T], [W, B]]``.

Eigenvalues of the full matrix are located through the 2x2 detection matrix
``W^T G(E) W - D + E I`` built from the spectrum of ``B``; eigenvectors are
rebuilt from its null vector.  Rank-one shifts ``M + c l l^T`` are solved
through the secular equation.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from ._rng import make_rng
from .ensembles import BlockDecomposition, SymmetricMatrix, block_decompose
from .errors import ConfigurationError, DataError, MultiplicityError, SingularityError, UndefinedSignError
from .spectral import Spectrum, eigendecompose, fix_signs

POLE_GUARD = 1e-12
DENOMINATOR_TOL = 1e-12
# eigenvalues of B closer than this (relative) are treated as one cluster
CLUSTER_TOL = 1e-11
# roots this close (relative) to a pole lose accuracy to cancellation and are
# re-examined; the pole itself is an eigenvalue when the test value is below POLE_EIG_TOL
POLE_ROOT_TOL = 1e-6
POLE_EIG_TOL = 1e-9


def _merge_clusters(spec: Spectrum, w1: np.ndarray, w2: np.ndarray):
    """Rotate each repeated eigenspace of ``B`` so at most two vectors see ``W``.

    Returns the (possibly) new spectrum and the overlaps with ``w1``, ``w2``.
    Inside a cluster the eigenvalues are replaced by their mean, and overlaps
    below rounding level are set to exactly zero, so the rotated-out
    directions are recognized as uncoupled.
    """
    lam = spec.eigenvalues
    a1, a2 = spec.overlaps(w1), spec.overlaps(w2)
    scale = max(1.0, float(np.abs(lam).max(initial=0.0)))
    split = np.flatnonzero(-np.diff(lam) > CLUSTER_TOL * scale) + 1
    groups = [g for g in np.split(np.arange(lam.size), split) if g.size > 1]
    if not groups:
        return spec, a1, a2
    lam, vecs = lam.copy(), spec.eigenvectors.copy()
    a1, a2 = a1.copy(), a2.copy()
    wscale = max(1.0, float(np.hypot(np.linalg.norm(w1), np.linalg.norm(w2))))
    for g in groups:
        C = np.column_stack([a1[g], a2[g]])
        U, sv, _ = np.linalg.svd(C, full_matrices=True)
        vecs[:, g] = vecs[:, g] @ U
        rot = U.T @ C
        rank = int(np.sum(sv > 1e-14 * wscale))
        rot[rank:] = 0.0
        a1[g], a2[g] = rot[:, 0], rot[:, 1]
        lam[g] = lam[g].mean()
    return Spectrum(lam, vecs, dict(spec.meta)), a1, a2


@dataclass(frozen=True)
class DetectionSystem:
    decomposition: BlockDecomposition
    b_spectrum: Spectrum
    w1: np.ndarray
    w2: np.ndarray
    d11: float
    d12: float
    d22: float
    a1: np.ndarray  # <w1, u_alpha>
    a2: np.ndarray  # <w2, u_alpha>

    @classmethod
    def from_matrix(cls, S) -> "DetectionSystem":
        if not isinstance(S, SymmetricMatrix):
            S = SymmetricMatrix(S)
        return cls.from_blocks(block_decompose(S))

    @classmethod
    def from_blocks(cls, blocks: BlockDecomposition, b_spectrum: Spectrum | None = None) -> "DetectionSystem":
        spec = b_spectrum or eigendecompose(blocks.B)
        w1 = np.ascontiguousarray(blocks.W[:, 0])
        w2 = np.ascontiguousarray(blocks.W[:, 1])
        spec, a1, a2 = _merge_clusters(spec, w1, w2)
        return cls(
            decomposition=blocks,
            b_spectrum=spec,
            w1=w1,
            w2=w2,
            d11=float(blocks.D[0, 0]),
            d12=float(blocks.D[0, 1]),
            d22=float(blocks.D[1, 1]),
            a1=a1,
            a2=a2,
        )

    @property
    def size(self) -> int:
        return self.b_spectrum.n + 2

    def frobenius_bound(self) -> float:
        """``||S||_F``, which bounds every eigenvalue of the full matrix."""
        b = self.decomposition
        return math.sqrt(
            float((b.D**2).sum()) + 2.0 * float((b.W**2).sum()) + float((self.b_spectrum.eigenvalues**2).sum())
        )

    def coupled_poles(self, tol: float = 1e-14) -> np.ndarray:
        """Mask of eigenvalues of ``B`` whose eigenvector sees ``W``.

        An uncoupled eigenvalue is a removable pole and stays an eigenvalue of
        the full matrix.
        """
        scale = max(1.0, float(np.abs(self.decomposition.W).max(initial=0.0)))
        return np.hypot(self.a1, self.a2) > tol * scale


def _check_pole_distance(mu: np.ndarray, E: float, guard: float = POLE_GUARD):
    if mu.size and np.min(np.abs(mu - E)) <= guard:
        raise SingularityError(f"E={E!r} lies within {guard} of an eigenvalue of B")


def green_entries(sys: DetectionSystem, E: float):
    """``(w1^T G(E) w1, w1^T G(E) w2, w2^T G(E) w2)`` with ``G = (B - E)^{-1}``."""
    mask = sys.coupled_poles()
    mu = sys.b_spectrum.eigenvalues[mask]
    _check_pole_distance(mu, E)
    return kernels.green_entries(mu, sys.a1[mask], sys.a2[mask], E)


def detection_matrix(sys: DetectionSystem, E: float) -> np.ndarray:
    g11, g12, g22 = green_entries(sys, E)
    off = g12 - sys.d12
    return np.array([[g11 - sys.d11 + E, off], [off, g22 - sys.d22 + E]])


def _intervals(poles: np.ndarray, bound: float):
    """Open pole-free intervals covering ``[-bound, bound]`` in ascending order."""
    pts = np.unique(poles)
    edges = np.concatenate([[min(-bound, pts[0] - 1.0) if pts.size else -bound], pts,
                            [max(bound, pts[-1] + 1.0) if pts.size else bound]])
    return [(edges[k], edges[k + 1], k > 0, k < edges.size - 2) for k in range(edges.size - 1)]


def _single_coupled_pole(sys: DetectionSystem, mu_value: float):
    """Index of the only coupled eigenvector of ``B`` at ``mu_value``, else None."""
    idx = np.flatnonzero(sys.coupled_poles() & (sys.b_spectrum.eigenvalues == mu_value))
    return int(idx[0]) if idx.size == 1 else None


def _reduced_detection_matrix(sys: DetectionSystem, k: int) -> np.ndarray:
    """Detection matrix at ``mu_k`` with the pole ``k`` removed."""
    mask = sys.coupled_poles()
    mask[k] = False
    mu = sys.b_spectrum.eigenvalues
    E = float(mu[k])
    g11, g12, g22 = kernels.green_entries(mu[mask], sys.a1[mask], sys.a2[mask], E)
    off = g12 - sys.d12
    return np.array([[g11 - sys.d11 + E, off], [off, g22 - sys.d22 + E]])


def pole_eigenvalue(sys: DetectionSystem, k: int, tol: float = POLE_EIG_TOL) -> bool:
    """Whether the coupled pole ``mu_k`` is itself an eigenvalue of the full matrix.

    At a simple pole with overlap vector ``a`` the full matrix has eigenvalue
    ``mu_k`` iff ``q^T M(mu_k) q = 0`` for ``q`` orthogonal to ``a``, where
    ``M`` is the detection matrix without the pole.
    """
    a = np.array([sys.a1[k], sys.a2[k]])
    q = np.array([-a[1], a[0]]) / np.linalg.norm(a)
    Mx = _reduced_detection_matrix(sys, k)
    return bool(abs(q @ Mx @ q) <= tol * (1.0 + np.abs(Mx).max()))


def _pole_roots(sys: DetectionSystem, roots: np.ndarray, window, complete: bool) -> np.ndarray:
    mask = sys.coupled_poles()
    mu = sys.b_spectrum.eigenvalues
    poles = np.unique(mu[mask])
    if poles.size == 0:
        return roots
    near = np.zeros(roots.size, dtype=bool)
    if roots.size:
        d = np.abs(roots[:, None] - poles[None, :])
        near = (d <= POLE_ROOT_TOL * np.maximum(1.0, np.abs(poles))[None, :]).any(axis=1)
    if window is None and complete and not near.any():
        return roots
    if window is not None:
        poles = poles[(poles > window[0]) & (poles < window[1])]
    found = []
    for value in poles:
        k = _single_coupled_pole(sys, float(value))
        if k is not None and pole_eigenvalue(sys, k):
            found.append(float(value))
    if not found:
        return roots
    keep = np.ones(roots.size, dtype=bool)
    for value in found:
        keep &= np.abs(roots - value) > POLE_ROOT_TOL * max(1.0, abs(value))
    return np.sort(np.concatenate([roots[keep], found]))[::-1]


def detection_roots(sys: DetectionSystem, window: tuple | None = None, probes: int = 8) -> np.ndarray:
    """Eigenvalues of the full matrix found as zeros of the detection matrix.

    Both eigenvalue branches of the detection matrix increase strictly between
    consecutive poles, so each branch has at most one zero per interval.  A
    sign scan with ``probes`` points per branch followed by bisection to full
    precision locates it.  Roots are returned in non-increasing order.
    """
    mask = sys.coupled_poles()
    mu = sys.b_spectrum.eigenvalues[mask]
    a1 = sys.a1[mask]
    a2 = sys.a2[mask]
    bound = sys.frobenius_bound() * (1.0 + 1e-12) + 1e-300
    roots = []
    for a, b, left_pole, right_pole in _intervals(mu, bound):
        lo = a + POLE_GUARD * max(1.0, abs(a)) if left_pole else a
        hi = b - POLE_GUARD * max(1.0, abs(b)) if right_pole else b
        if window is not None:
            lo, hi = max(lo, window[0]), min(hi, window[1])
        if not lo < hi:
            continue
        for upper in (0, 1):
            r = kernels.detection_branch_root(mu, a1, a2, sys.d11, sys.d12, sys.d22, lo, hi, upper, probes)
            if not math.isnan(r):
                roots.append(r)
    roots = np.sort(np.asarray(roots, dtype=np.float64))[::-1]
    expected = sys.size - int((~mask).sum())
    roots = _pole_roots(sys, roots, window, roots.size == expected)
    if window is None:
        if roots.size != expected:
            warnings.warn(
                f"detection found {roots.size} roots, interlacing count requires {expected}",
                RuntimeWarning,
                stacklevel=2,
            )
    return roots


def persistent_eigenvalues(sys: DetectionSystem) -> np.ndarray:
    """Eigenvalues of ``B`` that stay eigenvalues because ``W`` misses them."""
    return sys.b_spectrum.eigenvalues[~sys.coupled_poles()]


def detection_spectrum(sys: DetectionSystem) -> np.ndarray:
    both = np.concatenate([detection_roots(sys), persistent_eigenvalues(sys)])
    return np.sort(both)[::-1]


def bracket_diagnostic(sys: DetectionSystem, alpha: int) -> dict:
    """Check ``E0 < lambda_alpha < E1`` on ``(mu_alpha, mu_{alpha-1})``.

    ``E0`` is the larger zero of the two diagonal entries of the detection
    matrix on that interval; ``E1 = 2 max(<w_i, u_alpha>^2) + mu_alpha``.
    """
    mu = sys.b_spectrum.eigenvalues
    if not 2 <= alpha <= mu.size:
        raise ConfigurationError(f"alpha must lie in [2, {mu.size}]")
    lo, hi = mu[alpha - 1], mu[alpha - 2]
    g = POLE_GUARD * max(1.0, abs(lo), abs(hi))

    def diag_root(k):
        d = sys.d11 if k == 0 else sys.d22

        def f(E):
            return green_entries(sys, E)[0 if k == 0 else 2] - d + E

        a, b = lo + g, hi - g
        fa, fb = f(a), f(b)
        if fa > 0 or fb < 0:
            return math.nan
        for _ in range(200):
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            if f(m) < 0:
                a = m
            else:
                b = m
        return 0.5 * (a + b)

    E0 = max(diag_root(0), diag_root(1))
    E1 = 2.0 * max(sys.a1[alpha - 1] ** 2, sys.a2[alpha - 1] ** 2) + lo
    inside = detection_roots(sys, window=(lo + g, hi - g))
    lam = float(inside[0]) if inside.size else math.nan
    return {
        "alpha": alpha,
        "E0": float(E0),
        "E1": float(E1),
        "lambda": lam,
        "bracketed": bool(E0 < lam < E1),
    }


def reconstruct_eigenvector(sys: DetectionSystem, lam: float, null_tol: float = 1e-8) -> np.ndarray:
    """Unit eigenvector ``[q; -G(lam) W q]`` of the full matrix at a root ``lam``.

    When ``lam`` is a coupled pole of ``B`` the vector gains a component
    along that eigenvector of ``B``.
    """
    mu = sys.b_spectrum.eigenvalues
    k = _single_coupled_pole(sys, lam) if np.any(mu == lam) else None
    if k is not None:
        return _reconstruct_at_pole(sys, k)
    Mx = detection_matrix(sys, lam)
    vals, vecs = np.linalg.eigh(Mx)
    order = np.argsort(np.abs(vals))
    scale = 1.0 + np.abs(Mx).max()
    if abs(vals[order[1]]) <= null_tol * scale:
        raise MultiplicityError(f"two-dimensional null space at lambda={lam!r}")
    q = vecs[:, order[0]]
    mu = sys.b_spectrum.eigenvalues
    coeff = (sys.a1 * q[0] + sys.a2 * q[1]) / (mu - lam)
    mask = ~sys.coupled_poles()
    coeff[mask] = 0.0
    tail = -(sys.b_spectrum.eigenvectors @ coeff)
    v = np.concatenate([q, tail])
    v /= np.linalg.norm(v)
    return fix_signs(v[:, None])[:, 0]


def _reconstruct_at_pole(sys: DetectionSystem, k: int) -> np.ndarray:
    a = np.array([sys.a1[k], sys.a2[k]])
    q = np.array([-a[1], a[0]]) / np.linalg.norm(a)
    t = float(a @ _reduced_detection_matrix(sys, k) @ q) / float(a @ a)
    mu = sys.b_spectrum.eigenvalues
    mask = sys.coupled_poles()
    mask[k] = False
    coeff = np.zeros(mu.size)
    coeff[mask] = -(sys.a1[mask] * q[0] + sys.a2[mask] * q[1]) / (mu[mask] - mu[k])
    coeff[k] = t
    v = np.concatenate([q, sys.b_spectrum.eigenvectors @ coeff])
    v /= np.linalg.norm(v)
    return fix_signs(v[:, None])[:, 0]


def null_vector_formula(sys: DetectionSystem, lam: float) -> np.ndarray:
    """``q = (1, -(w1^T G w1 - d11 + lam) / (w1^T G w2 - d12))``."""
    g11, g12, _ = green_entries(sys, lam)
    den = g12 - sys.d12
    if abs(den) <= DENOMINATOR_TOL:
        raise UndefinedSignError(f"vanishing off-diagonal entry at E={lam!r}")
    return np.array([1.0, -(g11 - sys.d11 + lam) / den])


def sign_formula(sys: DetectionSystem, E: float) -> int:
    """``sign(-(w1^T G w1 - d11 + E) / (w1^T G w2 - d12))``, the sign of ``v(1) v(2)``."""
    g11, g12, _ = green_entries(sys, E)
    den = g12 - sys.d12
    if abs(den) <= DENOMINATOR_TOL:
        raise UndefinedSignError(f"vanishing off-diagonal entry at E={E!r}")
    return 1 if -(g11 - sys.d11 + E) / den > 0 else -1


def wgw_residual(sys: DetectionSystem, E: float, i: int, j: int) -> float:
    """``w_i^T G(E) w_j + delta_ij - <w_i,u><w_j,u>/(mu - E)`` for the pole nearest E."""
    if i not in (1, 2) or j not in (1, 2):
        raise ConfigurationError("i and j must be 1 or 2")
    mu = sys.b_spectrum.eigenvalues
    k = int(np.argmin(np.abs(mu - E)))
    if abs(mu[k] - E) <= 1e-14:
        raise SingularityError(f"E={E!r} coincides with an eigenvalue of B")
    a = (sys.a1, sys.a2)
    ai, aj = a[i - 1], a[j - 1]
    reduced = np.delete(ai * aj / (mu - E), k).sum()
    return float(reduced + (1.0 if i == j else 0.0))


def reduced_quadratic_form(spec: Spectrum, w: np.ndarray, E: float) -> float:
    """``w^T L(E) w`` where ``L`` drops the pole of ``G(E)`` nearest ``E``."""
    mu = spec.eigenvalues
    k = int(np.argmin(np.abs(mu - E)))
    a = spec.overlaps(w)
    return float(np.delete(a * a / (mu - E), k).sum())


def reduced_trace(spec: Spectrum, E: float) -> float:
    """``(1/n) sum_{alpha != alpha_E} 1/(mu_alpha - E)``."""
    mu = spec.eigenvalues
    k = int(np.argmin(np.abs(mu - E)))
    return float(np.delete(1.0 / (mu - E), k).sum() / mu.size)


def hanson_wright_envelope(matrix: np.ndarray, t: float, K: float = 1.0, c: float = 0.1) -> float:
    """``2 exp(-c min(t^2 / (K^4 ||A||_F^2), t / (K^2 ||A||)))``."""
    fro = np.linalg.norm(matrix, "fro")
    op = np.linalg.norm(matrix, 2)
    return float(2.0 * math.exp(-c * min(t * t / (K**4 * fro * fro), t / (K * K * op))))


# ---------------------------------------------------------------------------
# detection reports


@dataclass
class DetectionReport:
    roots: list
    reference: list
    max_root_error: float
    reconstruction_min_cosine: float
    signs_formula: list = field(default_factory=list)
    signs_direct: list = field(default_factory=list)
    degenerate_count: int = 0
    sign_mismatches: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def detection_report(S: SymmetricMatrix) -> DetectionReport:
    """Compare detection roots, reconstructed vectors and signs with a direct solve."""
    sys = DetectionSystem.from_matrix(S)
    full = eigendecompose(S)
    roots = detection_spectrum(sys)
    ref = full.eigenvalues
    err = float(np.abs(roots - ref).max()) if roots.size == ref.size else math.inf
    cos_min = 1.0
    sf, sd = [], []
    degenerate = mismatches = 0
    persistent = set(persistent_eigenvalues(sys).tolist())
    tol = 1e-8 * max(1.0, float(np.abs(ref).max(initial=0.0)))
    for lam in roots:
        if lam in persistent:
            continue
        try:
            v = reconstruct_eigenvector(sys, lam)
        except MultiplicityError:
            degenerate += 1
            continue
        space = np.abs(ref - lam) <= tol
        # a repeated eigenvalue only fixes its eigenspace
        cos_min = min(cos_min, float(np.linalg.norm(full.eigenvectors[:, space].T @ v)))
        if space.sum() != 1:
            degenerate += 1
            continue
        try:
            s = sign_formula(sys, lam)
        except (UndefinedSignError, SingularityError):
            degenerate += 1
            continue
        k = int(np.flatnonzero(space)[0])
        d = int(np.sign(full.eigenvectors[0, k] * full.eigenvectors[1, k]))
        sf.append(s)
        sd.append(d)
        mismatches += s != d
    return DetectionReport(
        roots=roots.tolist(),
        reference=ref.tolist(),
        max_root_error=err,
        reconstruction_min_cosine=cos_min,
        signs_formula=sf,
        signs_direct=sd,
        degenerate_count=degenerate,
        sign_mismatches=int(mismatches),
    )


# ---------------------------------------------------------------------------
# rank-one secular equation


@dataclass(frozen=True)
class SecularProblem:
    """Eigenproblem of ``M + c l l^T`` given the spectrum of ``M``."""

    m_spectrum: Spectrum
    l: np.ndarray
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ConfigurationError(f"shift strength must be positive, got {self.c}")
        l = np.asarray(self.l, dtype=np.float64)
        if l.shape != (self.m_spectrum.n,):
            raise DataError(f"direction has length {l.size}, expected {self.m_spectrum.n}")
        object.__setattr__(self, "l", l)

    def matrix(self) -> np.ndarray:
        v, nu = self.m_spectrum.eigenvectors, self.m_spectrum.eigenvalues
        return (v * nu) @ v.T + self.c * np.outer(self.l, self.l)


def _householder_merge(z: np.ndarray, vecs: np.ndarray):
    """Rotate a cluster of equal eigenvalues so only its first vector sees ``l``."""
    norm = np.linalg.norm(z)
    if norm == 0.0:
        return z, vecs
    e = np.zeros_like(z)
    e[0] = 1.0
    u = z / norm - e * (1.0 if z[0] >= 0 else -1.0)
    un = np.linalg.norm(u)
    if un == 0.0:
        return z, vecs
    u /= un
    H = np.eye(z.size) - 2.0 * np.outer(u, u)
    return H @ z, vecs @ H


def secular_solve(prob: SecularProblem, deflate_tol: float = 1e-14) -> dict:
    """Eigenvalues and eigenvectors of ``M + c l l^T`` with exact interlacing.

    Returns a dict with ``eigenvalues`` (non-increasing), ``eigenvectors``,
    and per-eigenvalue ``persistent`` flags marking deflated eigenvalues of M.
    """
    nu = prob.m_spectrum.eigenvalues.copy()
    V = prob.m_spectrum.eigenvectors.copy()
    z = V.T @ prob.l
    n = nu.size
    # merge clusters of exactly repeated eigenvalues
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and nu[stop] == nu[start]:
            stop += 1
        if stop - start > 1:
            z[start:stop], V[:, start:stop] = _householder_merge(z[start:stop], V[:, start:stop])
        start = stop
    live = np.abs(z) > deflate_tol * max(np.linalg.norm(z), 1e-300)
    if not live.any():
        return {"eigenvalues": nu, "eigenvectors": V, "persistent": np.ones(n, dtype=bool)}

    nu_l, z_l = nu[live], z[live]
    origin, tau = kernels.secular_roots(nu_l, z_l * z_l, prob.c)
    m = nu_l.size
    mu_l = nu_l[origin] + tau
    # keep each root inside its interlacing interval
    upper = np.concatenate([[np.inf], nu_l[:-1]])
    mu_l = np.minimum(np.maximum(mu_l, nu_l), upper)

    # differences nu_j - mu_k computed from the nearest pole
    diff = (nu_l[:, None] - nu_l[origin][None, :]) - tau[None, :]  # (j, k)
    # recompute z from the computed roots so the eigenvectors come out orthogonal
    logs = np.zeros(m)
    for j in range(m):
        ratio = -diff[j, :] / np.where(np.arange(m) == j, 1.0, nu_l - nu_l[j])
        ratio[j] = -diff[j, j] / prob.c
        logs[j] = np.log(np.abs(ratio)).sum()
    z_hat = np.copysign(np.exp(0.5 * logs), z_l)
    cols = z_hat[:, None] / diff
    cols /= np.linalg.norm(cols, axis=0)
    U_l = V[:, live] @ cols

    vals = np.concatenate([mu_l, nu[~live]])
    vecs = np.concatenate([U_l, V[:, ~live]], axis=1)
    persistent = np.concatenate([np.zeros(m, dtype=bool), np.ones(n - m, dtype=bool)])
    order = np.argsort(-vals, kind="stable")
    return {
        "eigenvalues": vals[order],
        "eigenvectors": fix_signs(vecs[:, order]),
        "persistent": persistent[order],
    }


def secular_eigenvalues(prob: SecularProblem) -> Spectrum:
    out = secular_solve(prob)
    return Spectrum(out["eigenvalues"], out["eigenvectors"], {"rank_one_c": prob.c})


def secular_residual(prob: SecularProblem, mu: float) -> float:
    """``|sum <l,v>^2 / (nu - mu) + 1/c|``."""
    z = prob.m_spectrum.overlaps(prob.l)
    return float(abs(np.sum(z * z / (prob.m_spectrum.eigenvalues - mu)) + 1.0 / prob.c))


def interlaces(upper: np.ndarray, lower: np.ndarray) -> bool:
    """``upper_1 >= lower_1 >= upper_2 >= ... >= upper_n >= lower_n`` exactly."""
    upper = np.asarray(upper)
    lower = np.asarray(lower)
    return bool(np.all(upper >= lower) and np.all(upper[1:] <= lower[:-1]))


def sticking_report(prob: SecularProblem, beta: int, spectrum: Spectrum | None = None) -> dict:
    """Gap ``nu_beta - mu_{beta+1}`` and ratio ``<l, v_beta>^2 / gap``."""
    n = prob.m_spectrum.n
    if not 1 <= beta < n:
        raise ConfigurationError(f"beta must lie in [1, {n - 1}]")
    spectrum = spectrum or secular_eigenvalues(prob)
    nu_b = prob.m_spectrum.eigenvalues[beta - 1]
    gap = float(nu_b - spectrum.eigenvalues[beta])
    z_b = float(prob.m_spectrum.vector(beta) @ prob.l)
    if gap > 0:
        return {"beta": beta, "gap": gap, "overlap_ratio": z_b * z_b / gap, "ratio_defined": True}
    return {"beta": beta, "gap": gap, "overlap_ratio": math.nan, "ratio_defined": False}


# ---------------------------------------------------------------------------
# sign probabilities

ENTRY_LAWS = ("bernoulli", "gaussian", "rademacher")


def centered_entries(rng: np.random.Generator, shape, n: int, law: str = "bernoulli", p: float = 0.5) -> np.ndarray:
    """Centered entries of variance ``1/n`` from the given law."""
    if law == "bernoulli":
        a = (rng.random(shape) < p).astype(np.float64)
        return (a - p) / math.sqrt(p * (1.0 - p) * n)
    if law == "gaussian":
        return rng.standard_normal(shape) / math.sqrt(n)
    if law == "rademacher":
        return (2.0 * rng.integers(0, 2, size=shape) - 1.0) / math.sqrt(n)
    raise ConfigurationError(f"unknown entry law {law!r}; expected one of {ENTRY_LAWS}")


def _third_absolute_moment(law: str, p: float) -> float:
    """``E|xi|^3`` for the standardized entry."""
    if law == "bernoulli":
        q = 1.0 - p
        return (p * q**3 + q * p**3) / (p * q) ** 1.5
    if law == "gaussian":
        return 2.0 * math.sqrt(2.0 / math.pi)
    return 1.0


def berry_esseen_envelope(u: np.ndarray, law: str = "bernoulli", p: float = 0.5, constant: float = 0.5) -> float:
    """Bound on ``|P(<w, u> > 0) - 1/2|`` for independent centered entries."""
    u = np.asarray(u, dtype=np.float64)
    return float(constant * _third_absolute_moment(law, p) * np.sum(np.abs(u) ** 3) / np.sum(u * u) ** 1.5)


def pair_sign_probability(b_spec: Spectrum, alpha: int, trials: int, seed, *, law: str = "bernoulli",
                          p: float = 0.5, product: bool = False, chunk: int = 1000) -> dict:
    """Empirical ``P(<w, u_alpha> > 0)`` over resampled ``w``.

    With ``product=True`` the statistic is ``E sign(<w1,u><w2,u>)`` for two
    independent resamples.  Exact zeros are counted separately.
    """
    u = b_spec.vector(alpha)
    n = u.size
    rng = make_rng(seed)
    positive = zeros = 0
    prod_sum = 0
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        s1 = centered_entries(rng, (k, n), n, law, p) @ u
        if product:
            s2 = centered_entries(rng, (k, n), n, law, p) @ u
            prod = np.sign(s1) * np.sign(s2)
            prod_sum += int(prod.sum())
            zeros += int((prod == 0).sum())
        else:
            positive += int((s1 > 0).sum())
            zeros += int((s1 == 0).sum())
        done += k
    if product:
        valid = trials - zeros
        mean = prod_sum / valid if valid else math.nan
        se = math.sqrt(max(1.0 - mean * mean, 0.0) / valid) if valid else math.nan
        return {"statistic": "product_sign_mean", "value": mean, "se": se, "trials": trials, "zeros": zeros}
    valid = trials - zeros
    phat = positive / valid if valid else math.nan
    se = math.sqrt(phat * (1.0 - phat) / valid) if valid else math.nan
    return {
        "statistic": "positive_probability",
        "value": phat,
        "se": se,
        "trials": trials,
        "zeros": zeros,
        "berry_esseen": berry_esseen_envelope(u, law, p),
    }
