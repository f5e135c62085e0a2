"""Odd polynomial approximation of a smoothed sign function in a weighted
Sobolev space, and expectations under the law of a product of two
independent standard Gaussians."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.hermite_e import hermegauss
from numpy.polynomial.laguerre import laggauss
from numpy.polynomial.legendre import leggauss
from scipy import integrate, special
from scipy.linalg import cho_factor, cho_solve

from .errors import ConfigurationError, DomainError, IllConditionedError

TAIL_START = 2.0
COND_LIMIT = 1e12


# ---------------------------------------------------------------------------
# weights


def _s(x):
    ax = np.abs(x)
    return np.where(ax <= TAIL_START, 0.25 * x * x + 1.0, ax)


def _psi(x):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-0.5 * _s(x)) / math.pi


def _psi_prime(x):
    x = np.asarray(x, dtype=np.float64)
    ds = np.where(np.abs(x) <= TAIL_START, 0.5 * x, np.sign(x))
    return -0.5 * ds * _psi(x)


@dataclass(frozen=True)
class WeightPair:
    """Even weights ``eta`` (on values) and ``psi`` (on derivatives)."""

    eta: object = _psi
    psi: object = _psi
    psi_prime: object = _psi_prime
    tail_start: float = TAIL_START
    name: str = "quadratic-bridge"


def default_weights() -> WeightPair:
    """``psi = eta = exp(-s/2)/pi`` with ``s = x^2/4 + 1`` on ``[-2, 2]`` and ``|x|`` outside."""
    return WeightPair()


# ---------------------------------------------------------------------------
# functions in H


@dataclass(frozen=True)
class HFunction:
    """A piecewise-smooth function with its derivative and kink locations."""

    value: object
    deriv: object
    breakpoints: tuple = ()
    odd: bool | None = None

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=np.float64))


def as_hfunction(f) -> HFunction:
    if isinstance(f, HFunction):
        return f
    if isinstance(f, SignPolynomial):
        return HFunction(f.__call__, f.derivative, (), True)
    if isinstance(f, Polynomial):
        d = f.deriv()
        return HFunction(lambda x: f(x), lambda x: d(x))
    if isinstance(f, (int, float)):
        c = float(f)
        return HFunction(lambda x: np.full_like(np.asarray(x, dtype=float), c), lambda x: np.zeros_like(np.asarray(x, dtype=float)), (), False)
    raise DomainError(f"cannot interpret {type(f).__name__} as a member of H")


def smoothed_sign(r: float) -> HFunction:
    """Odd C^1 step: ``sign(x)`` for ``|x| >= r``, quintic ``(15t - 10t^3 + 3t^5)/8`` inside, ``t = x/r``.

    The quintic has value 1 and vanishing first and second derivatives at
    ``t = 1``.
    """
    if not r > 0:
        raise ConfigurationError(f"radius must be positive, got {r}")

    def value(x):
        x = np.asarray(x, dtype=np.float64)
        t = np.clip(x / r, -1.0, 1.0)
        t2 = t * t
        return t * (15.0 - 10.0 * t2 + 3.0 * t2 * t2) / 8.0

    def deriv(x):
        x = np.asarray(x, dtype=np.float64)
        t = x / r
        inside = np.abs(t) < 1.0
        t2 = t * t
        return np.where(inside, 15.0 * (1.0 - t2) ** 2 / (8.0 * r), 0.0)

    return HFunction(value, deriv, (-r, r), True)


def monomial(k: int) -> HFunction:
    return HFunction(lambda x: np.asarray(x, dtype=float) ** k,
                     lambda x: k * np.asarray(x, dtype=float) ** (k - 1) if k else np.zeros_like(np.asarray(x, dtype=float)),
                     (), k % 2 == 1)


# ---------------------------------------------------------------------------
# inner products


class SobolevQuadrature:
    """Discrete ``H`` inner product on symmetric nodes.

    Gauss-Legendre on the pieces of ``[-2, 2]`` cut at the breakpoints and
    Gauss-Laguerre on the two exponential tails (``x = 2 + 2t``).  For the
    default weights, polynomial integrands on the tails are integrated exactly
    up to degree ``2 * n_tail - 1``.
    """

    def __init__(self, breakpoints=(), n_piece: int = 120, n_tail: int = 100, w: WeightPair | None = None):
        self.w = w or default_weights()
        cuts = sorted({abs(float(b)) for b in breakpoints if 0 < abs(b) < TAIL_START})
        edges = [0.0, *cuts, TAIL_START]
        gx, gw = leggauss(n_piece)
        xs, ws = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            xs.append(0.5 * (b - a) * gx + 0.5 * (a + b))
            ws.append(0.5 * (b - a) * gw)
        lx, lw = laggauss(n_tail)
        # int_2^inf F(x) e^{-x/2} dx = 2 e^{-1} int_0^inf F(2 + 2t) e^{-t} dt
        tail_x = TAIL_START + 2.0 * lx
        pos_x = np.concatenate(xs)
        pos_wx = np.concatenate(ws)
        self.tail_size = tail_x.size
        x = np.concatenate([pos_x, tail_x])
        self.x = np.concatenate([-x[::-1], x])
        interior_eta = pos_wx * self.w.eta(pos_x)
        interior_psi = pos_wx * self.w.psi(pos_x)
        tail_scale = 2.0 * math.exp(-1.0) / math.pi
        eta_w = np.concatenate([interior_eta, tail_scale * lw])
        psi_w = np.concatenate([interior_psi, tail_scale * lw])
        self.eta_w = np.concatenate([eta_w[::-1], eta_w])
        self.psi_w = np.concatenate([psi_w[::-1], psi_w])

    def embed(self, f: HFunction) -> np.ndarray:
        """Vector whose dot products reproduce the discrete inner product."""
        return np.concatenate([np.sqrt(self.eta_w) * f.value(self.x), np.sqrt(self.psi_w) * f.deriv(self.x)])

    def inner(self, f, g) -> float:
        f, g = as_hfunction(f), as_hfunction(g)
        a = self.eta_w * f.value(self.x) * g.value(self.x)
        b = self.psi_w * f.deriv(self.x) * g.deriv(self.x)
        terms = a + b
        total = float(terms.sum())
        if not math.isfinite(total):
            raise DomainError("inner product integrand is not integrable against the weights")
        # the outermost tail nodes must carry negligible mass
        far = np.abs(self.x) >= np.sort(np.abs(self.x))[-4]
        if np.abs(terms[far]).sum() > 1e-8 * np.abs(terms).sum() + 1e-300:
            raise DomainError("integrand does not decay fast enough for the weights")
        return total


def _moment_tail(k: int) -> mpmath.mpf:
    """``int_{|x|>2} |x|^k e^{-|x|/2} / pi dx`` for even ``k``."""
    return 2 / mpmath.pi * mpmath.mpf(2) ** (k + 1) * mpmath.gammainc(k + 1, 1)


def _moment_interior(k: int) -> mpmath.mpf:
    """``int_{-2}^{2} x^k e^{-(x^2/4 + 1)/2} / pi dx`` for even ``k``."""
    return mpmath.exp(-0.5) / mpmath.pi * mpmath.mpf(8) ** (mpmath.mpf(k + 1) / 2) * mpmath.gammainc(
        mpmath.mpf(k + 1) / 2, 0, 0.5
    )


def weight_moment(k: int, dps: int = 50) -> mpmath.mpf:
    """``int x^k psi(x) dx`` in closed form (incomplete gamma functions)."""
    if k % 2:
        return mpmath.mpf(0)
    with mpmath.workdps(dps):
        return _moment_tail(k) + _moment_interior(k)


def monomial_inner(a: int, b: int, dps: int = 50) -> mpmath.mpf:
    """``<x^a, x^b>_H`` in closed form for the default weights."""
    with mpmath.workdps(dps):
        val = weight_moment(a + b, dps)
        if a and b:
            val += a * b * weight_moment(a + b - 2, dps)
        return val


def sobolev_inner(f, g, w: WeightPair | None = None, method: str = "gauss") -> float:
    """``int f g eta + int f' g' psi``.

    ``method`` is ``"gauss"`` (fixed composite Gauss rules), ``"quad"``
    (adaptive quadrature) or ``"moments"`` (closed form, monomials and
    numpy polynomials only).
    """
    w = w or default_weights()
    if method == "moments":
        return _inner_moments(f, g)
    F, G = as_hfunction(f), as_hfunction(g)
    breaks = tuple(F.breakpoints) + tuple(G.breakpoints)
    if method == "gauss":
        return SobolevQuadrature(breaks, w=w).inner(F, G)
    if method == "quad":
        return _inner_quad(F, G, w, breaks)
    raise ConfigurationError(f"unknown method {method!r}")


def _inner_moments(f, g) -> float:
    def coeffs(p):
        if isinstance(p, Polynomial):
            return [float(c) for c in p.coef]
        if isinstance(p, (int, float)):
            return [float(p)]
        raise DomainError("closed-form moments need polynomial arguments")

    cf, cg = coeffs(f), coeffs(g)
    with mpmath.workdps(50):
        total = mpmath.mpf(0)
        for a, ca in enumerate(cf):
            for b, cb in enumerate(cg):
                if ca and cb:
                    total += ca * cb * monomial_inner(a, b)
        return float(total)


def _inner_quad(F: HFunction, G: HFunction, w: WeightPair, breaks) -> float:
    def integrand(x):
        return float(F.value(x) * G.value(x) * w.eta(x) + F.deriv(x) * G.deriv(x) * w.psi(x))

    pts = sorted({-TAIL_START, TAIL_START, *[float(b) for b in breaks]})
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += integrate.quad(integrand, a, b, epsabs=0, epsrel=1e-13, limit=400)[0]
    for a, b in ((TAIL_START, np.inf), (-np.inf, -TAIL_START)):
        val, err = integrate.quad(integrand, a, b, epsabs=0, epsrel=1e-13, limit=400)
        if not math.isfinite(val):
            raise DomainError("integrand does not converge against the weights")
        total += val
    return total


def gram_matrix_exact(degree: int, dps: int = 60) -> mpmath.matrix:
    """Gram matrix of ``x, x^3, ..., x^degree`` in extended precision."""
    ks = list(range(1, degree + 1, 2))
    with mpmath.workdps(dps):
        G = mpmath.matrix(len(ks))
        for i, a in enumerate(ks):
            for j, b in enumerate(ks):
                if j >= i:
                    G[i, j] = G[j, i] = monomial_inner(a, b, dps)
        return G


def gram_min_eigenvalue(degree: int, dps: int = 120) -> mpmath.mpf:
    """Smallest eigenvalue of the diagonally scaled monomial Gram matrix."""
    with mpmath.workdps(dps):
        G = gram_matrix_exact(degree, dps)
        d = [1 / mpmath.sqrt(G[i, i]) for i in range(G.rows)]
        S = mpmath.matrix(G.rows)
        for i in range(G.rows):
            for j in range(G.rows):
                S[i, j] = G[i, j] * d[i] * d[j]
        evals = mpmath.eigsy(S, eigvals_only=True)
        return min(evals)


# ---------------------------------------------------------------------------
# projection


@dataclass
class SignPolynomial:
    """Odd polynomial ``Q(x) = sum_k c_k x^(2k+1)``.

    Evaluation uses the H-orthonormal recurrence the projection was built
    with, which is far better conditioned than the monomial coefficients.
    """

    odd_coeffs: np.ndarray
    degree: int
    h_params: dict
    errors: dict = field(default_factory=dict)
    recurrence: dict | None = None

    def _basis_values(self, x: np.ndarray):
        """Orthonormal basis values and derivatives at ``x``."""
        rec = self.recurrence
        H = np.asarray(rec["h"])
        m = H.shape[1] + 1
        x2 = x * x
        vals = [x / rec["norm0"]]
        ders = [np.ones_like(x) / rec["norm0"]]
        for k in range(m - 1):
            v = x2 * vals[k]
            d = 2.0 * x * vals[k] + x2 * ders[k]
            for j in range(k + 1):
                v = v - H[j, k] * vals[j]
                d = d - H[j, k] * ders[j]
            vals.append(v / H[k + 1, k])
            ders.append(d / H[k + 1, k])
        return vals, ders

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.recurrence is None:
            t = x * x
            return x * np.polynomial.polynomial.polyval(t, self.odd_coeffs)
        vals, _ = self._basis_values(x)
        return sum(c * v for c, v in zip(self.recurrence["c"], vals))

    def derivative(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.recurrence is None:
            k = np.arange(self.odd_coeffs.size)
            return np.polynomial.polynomial.polyval(x * x, self.odd_coeffs * (2 * k + 1))
        _, ders = self._basis_values(x)
        return sum(c * d for c, d in zip(self.recurrence["c"], ders))

    def to_json(self) -> str:
        d = {
            "odd_coeffs": [float(c) for c in self.odd_coeffs],
            "degree": self.degree,
            "r": self.h_params.get("r"),
            "h_params": self.h_params,
            "errors": self.errors,
            "recurrence": None
            if self.recurrence is None
            else {
                "h": np.asarray(self.recurrence["h"]).tolist(),
                "c": [float(c) for c in self.recurrence["c"]],
                "norm0": float(self.recurrence["norm0"]),
            },
        }
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SignPolynomial":
        d = json.loads(text)
        rec = d.get("recurrence")
        if rec is not None:
            rec = {"h": np.asarray(rec["h"]), "c": np.asarray(rec["c"]), "norm0": rec["norm0"]}
        return cls(np.asarray(d["odd_coeffs"]), int(d["degree"]), d["h_params"], d["errors"], rec)


def _orthonormal_odd_basis(quad: SobolevQuadrature, m: int):
    """H-orthonormal basis of ``span{x, x^3, ..., x^(2m-1)}`` by Arnoldi with ``x^2``.

    Returns embedded vectors (columns), the Hessenberg coefficients and the
    norm of ``x``.
    """
    x = quad.x
    se, sp = np.sqrt(quad.eta_w), np.sqrt(quad.psi_w)
    vals = x.copy()
    ders = np.ones_like(x)
    norm0 = float(np.linalg.norm(np.concatenate([se * vals, sp * ders])))
    vals, ders = vals / norm0, ders / norm0
    Q = [np.concatenate([se * vals, sp * ders])]
    V, D = [vals], [ders]
    Hm = np.zeros((m + 1, m))
    for k in range(m - 1):
        nv = x * x * V[k]
        nd = 2.0 * x * V[k] + x * x * D[k]
        emb = np.concatenate([se * nv, sp * nd])
        for _ in range(2):  # re-orthogonalize once
            for j in range(k + 1):
                c = float(Q[j] @ emb)
                Hm[j, k] += c
                emb = emb - c * Q[j]
                nv = nv - c * V[j]
                nd = nd - c * D[j]
        nrm = float(np.linalg.norm(emb))
        Hm[k + 1, k] = nrm
        Q.append(emb / nrm)
        V.append(nv / nrm)
        D.append(nd / nrm)
    return np.column_stack(Q), Hm[:m, : m - 1] if m > 1 else np.zeros((1, 0)), norm0


def _recurrence_monomials(Hm: np.ndarray, norm0: float, c: np.ndarray) -> np.ndarray:
    """Monomial coefficients (in ``t = x^2``, times ``x``) of ``sum c_k q_k``."""
    m = c.size
    polys = [np.array([1.0 / norm0])]
    for k in range(m - 1):
        nxt = np.concatenate([[0.0], polys[k]])
        for j in range(k + 1):
            nxt[: polys[j].size] -= Hm[j, k] * polys[j]
        polys.append(nxt / Hm[k + 1, k])
    out = np.zeros(m)
    for ck, p in zip(c, polys):
        out[: p.size] += ck * p
    return out


def project_odd(h, degree: int, w: WeightPair | None = None, basis: str = "auto",
                sup_range: tuple = (0.1, 10.0), n_sup: int = 20001) -> SignPolynomial:
    """Best H-approximation of ``h`` by odd polynomials of degree at most ``degree``.

    ``basis="monomial"`` solves the monomial Gram system by Cholesky and
    raises ``IllConditionedError`` when its scaled condition number exceeds
    1e12; ``"orthogonal"`` uses an H-orthonormal basis; ``"auto"`` tries the
    monomial system first.
    """
    if degree < 1 or degree % 2 == 0:
        raise ConfigurationError(f"degree must be odd and >= 1, got {degree}")
    w = w or default_weights()
    H = as_hfunction(h)
    m = (degree + 1) // 2
    quad = SobolevQuadrature(H.breakpoints, w=w)
    h_emb = quad.embed(H)
    r = next((abs(b) for b in H.breakpoints if b), None)
    params = {"r": r, "degree_cap": degree, "weights": w.name}

    if basis in ("monomial", "auto"):
        try:
            poly = _project_monomial(H, quad, m, h_emb, params)
            poly.errors.update(_approximation_errors(H, poly, sup_range, n_sup))
            return poly
        except IllConditionedError:
            if basis == "monomial":
                raise
    elif basis != "orthogonal":
        raise ConfigurationError(f"unknown basis {basis!r}")

    Qmat, Hm, norm0 = _orthonormal_odd_basis(quad, m)
    c = Qmat.T @ h_emb
    # direct norm of the residual; the Pythagorean difference loses half the digits near 0
    resid = float(np.linalg.norm(h_emb - Qmat @ c))
    poly = SignPolynomial(
        odd_coeffs=_recurrence_monomials(Hm, norm0, c),
        degree=2 * m - 1,
        h_params={**params, "basis": "orthogonal"},
        errors={"sobolev": resid},
        recurrence={"h": Hm, "c": c, "norm0": norm0},
    )
    poly.errors.update(_approximation_errors(H, poly, sup_range, n_sup))
    return poly


def sobolev_error_profile(h, degrees, w: WeightPair | None = None) -> np.ndarray:
    """Projection errors for each degree cap, from one orthonormal basis.

    ``||h - Q_d||^2 = ||h||^2 - sum_{k<=d} c_k^2``, so the profile is
    non-increasing by construction.
    """
    w = w or default_weights()
    H = as_hfunction(h)
    degrees = list(degrees)
    m = (max(degrees) + 1) // 2
    quad = SobolevQuadrature(H.breakpoints, w=w)
    h_emb = quad.embed(H)
    Qmat, _, _ = _orthonormal_odd_basis(quad, m)
    c = Qmat.T @ h_emb
    tail = np.maximum(float(h_emb @ h_emb) - np.cumsum(c * c), 0.0)
    return np.sqrt(np.array([tail[(d + 1) // 2 - 1] for d in degrees]))


def _project_monomial(H, quad, m, h_emb, params) -> SignPolynomial:
    with mpmath.workdps(40):
        Gx = gram_matrix_exact(2 * m - 1, 40)
        dx = [1 / mpmath.sqrt(Gx[i, i]) for i in range(m)]
        Gs = np.array([[float(Gx[i, j] * dx[i] * dx[j]) for j in range(m)] for i in range(m)])
        d = np.array([float(v) for v in dx])
    if not np.all(d > 0):
        raise IllConditionedError("monomial norms overflow double precision")
    cond = np.linalg.cond(Gs)
    if not cond <= COND_LIMIT:
        raise IllConditionedError(f"scaled Gram condition number {cond:.3g} exceeds {COND_LIMIT:.0e}")
    b = np.array([quad.inner(H, monomial(2 * k + 1)) for k in range(m)])
    y = cho_solve(cho_factor(Gs), b * d)
    coef = y * d
    poly = SignPolynomial(
        odd_coeffs=coef,
        degree=2 * m - 1,
        h_params={**params, "basis": "monomial", "gram_condition": float(cond)},
    )
    poly.errors["sobolev"] = float(np.linalg.norm(h_emb - quad.embed(as_hfunction(poly))))
    return poly


def product_density(x):
    """Density ``K_0(|x|) / pi`` of ``g1 * g2``."""
    return special.k0(np.abs(np.asarray(x, dtype=np.float64))) / math.pi


def _approximation_errors(H: HFunction, poly: SignPolynomial, sup_range, n_sup) -> dict:
    a, b = sup_range
    grid = np.linspace(a, b, n_sup)
    grid = np.concatenate([-grid[::-1], grid])
    sup = float(np.max(np.abs(H.value(grid) - poly(grid))))

    def integrand(x):
        return float((H.value(x) - poly(np.asarray(x))) ** 2 * product_density(x))

    pts = sorted({abs(float(p)) for p in H.breakpoints} | {0.0, 1.0, 2.0, 5.0, 10.0, 20.0})
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += integrate.quad(integrand, lo, hi, limit=200)[0]
    total += integrate.quad(integrand, pts[-1], np.inf, limit=200)[0]
    return {"sup": sup, "sup_range": [a, b], "l2mu": math.sqrt(2.0 * total)}


def residual_orthogonality(h, poly: SignPolynomial, w: WeightPair | None = None) -> dict:
    """H inner products of ``h - Q`` with the odd monomials, each normalized."""
    w = w or default_weights()
    H = as_hfunction(h)
    quad = SobolevQuadrature(H.breakpoints, w=w)
    diff = HFunction(lambda x: H.value(x) - poly(x), lambda x: H.deriv(x) - poly.derivative(x))
    out = []
    for k in range(1, poly.degree + 1, 2):
        mk = monomial(k)
        nrm = math.sqrt(float(monomial_inner(k, k)))
        out.append(quad.inner(diff, mk) / nrm)
    h_norm = math.sqrt(quad.inner(H, H))
    return {"normalized_monomials": np.asarray(out), "h_norm": h_norm}


# ---------------------------------------------------------------------------
# Gaussian product law


def gauss_product_expectation(f, order: int = 80, degree: int | None = None) -> float:
    """``E f(g1 g2)`` for independent standard Gaussians by tensor Gauss-Hermite.

    Node pairs ``(x, y)`` and ``(-x, y)`` are summed together, so odd
    integrands (evaluated oddly) give exactly zero.  When ``degree`` is
    given the rule must integrate it exactly with four degrees to spare.
    """
    if degree is not None and 2 * order - 1 < degree + 4:
        raise ConfigurationError(f"order {order} too small for degree {degree}; need >= {(degree + 6) // 2}")
    if isinstance(f, SignPolynomial):
        fn = f
    elif isinstance(f, Polynomial):
        fn = f
    elif callable(f):
        fn = f
    else:
        raise ConfigurationError("f must be callable")
    x, wx = hermegauss(order)
    keep = x > 0
    xp, wp = x[keep], wx[keep]
    prod = np.outer(xp, x)
    vals = fn(prod) + fn(-prod)
    total = float(np.einsum("i,j,ij->", wp, wx, vals))
    if order % 2:  # zero node contributes f(0) once per column
        zero = ~(x > 0) & ~(x < 0)
        total += float(wx[zero][0] * np.sum(wx * fn(np.zeros_like(x))))
    return total / (2.0 * math.pi)


def product_moment(d: int) -> int:
    """``E (g1 g2)^(2d) = ((2d-1)!!)^2``."""
    df = math.prod(range(2 * d - 1, 0, -2)) if d else 1
    return df * df


# ---------------------------------------------------------------------------
# continuity estimate


def holder_bound(f, a: float, b: float, M: float, w: WeightPair | None = None, norm: float | None = None) -> dict:
    """Both sides of ``|f(b) - f(a)| <= (min psi)^(-1) ||f||_H (max psi)^(1/2) (b - a)^(1/2)``.

    ``min`` and ``max`` of ``psi`` are over ``[-M, M]``.
    """
    w = w or default_weights()
    if not -M <= a <= b <= M:
        raise ConfigurationError("need -M <= a <= b <= M")
    F = as_hfunction(f)
    if norm is None:
        norm = math.sqrt(sobolev_inner(F, F, w))
    psi_min = float(w.psi(M))
    psi_max = float(w.psi(0.0))
    lhs = float(abs(F.value(np.float64(b)) - F.value(np.float64(a))))
    rhs = norm * math.sqrt(psi_max) * math.sqrt(b - a) / psi_min
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs}


def holder_bound_check(f, a: float, b: float, M: float, w: WeightPair | None = None, norm: float | None = None) -> bool:
    return holder_bound(f, a, b, M, w, norm)["holds"]
