import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import Polynomial
from numpy.polynomial import chebyshev as C
from scipy import integrate, optimize

from nodal_lab.errors import ConfigurationError, IllConditionedError
from nodal_lab.signpoly import (
    HFunction,
    SignPolynomial,
    default_weights,
    gauss_product_expectation,
    gram_matrix_exact,
    gram_min_eigenvalue,
    holder_bound,
    holder_bound_check,
    monomial,
    monomial_inner,
    product_moment,
    project_odd,
    residual_orthogonality,
    smoothed_sign,
    sobolev_error_profile,
    sobolev_inner,
)

W = default_weights()


def test_weight_boundary_and_tail():
    assert W.psi(2.0) == pytest.approx(math.exp(-1) / math.pi, rel=1e-15)
    x = np.linspace(2, 30, 50)
    np.testing.assert_allclose(W.psi(x), np.exp(-x / 2) / math.pi, rtol=1e-14)
    np.testing.assert_allclose(W.eta(-x), W.psi(x), rtol=1e-14)
    xs = np.linspace(0.01, 40, 500)
    assert np.all(W.eta(xs) >= W.psi(xs))
    total, _ = integrate.quad(W.eta, -np.inf, np.inf)
    assert math.isfinite(total)


def _psi_mp(x):
    x = mpmath.mpf(x)
    s = x * x / 4 + 1 if abs(x) <= 2 else abs(x)
    return mpmath.exp(-s / 2) / mpmath.pi


def test_weight_c1_at_junction():
    with mpmath.workdps(40):
        left = mpmath.diff(_psi_mp, 2, direction=-1)
        right = mpmath.diff(_psi_mp, 2, direction=1)
        assert abs(left - right) <= 1e-12
        assert abs(float(left) - W.psi_prime(2.0)) <= 1e-12
    assert abs(W.psi_prime(2 - 1e-15) - W.psi_prime(2 + 1e-15)) <= 1e-12
    h = 1e-6
    assert abs((W.psi(2 + h) - W.psi(2 - h)) / (2 * h) - W.psi_prime(2.0)) <= 1e-8
    x = np.linspace(-6, 6, 37)
    np.testing.assert_allclose(W.psi(x), [float(_psi_mp(v)) for v in x], rtol=1e-14)


def test_sobolev_inner_examples():
    assert sobolev_inner(monomial(1), monomial(3)) > 0
    assert sobolev_inner(monomial(0), monomial(1)) == pytest.approx(0, abs=1e-14)
    x = Polynomial([0, 1.0])
    quad = sobolev_inner(x, x, method="quad")
    gauss = sobolev_inner(x, x, method="gauss")
    moments = sobolev_inner(x, x, method="moments")
    assert abs(quad - moments) <= 1e-8 and abs(gauss - moments) <= 1e-8


def test_sobolev_inner_symmetric_and_positive():
    h = smoothed_sign(0.3)
    p = Polynomial([0, 1.0, 0, -0.2])
    assert sobolev_inner(h, p) == pytest.approx(sobolev_inner(p, h), rel=1e-13)
    assert sobolev_inner(h, h) > 0
    assert sobolev_inner(h, h) == pytest.approx(sobolev_inner(h, h, method="quad"), rel=1e-8)


def test_monomial_moments_closed_form_vs_quadrature():
    for a, b in [(1, 1), (1, 3), (3, 5), (7, 9)]:
        num = sobolev_inner(monomial(a), monomial(b), method="quad")
        assert float(monomial_inner(a, b)) == pytest.approx(num, rel=1e-8)


def test_smoothed_sign_shape():
    r = 0.1
    h = smoothed_sign(r)
    assert h(r) == 1.0 and h(-r) == -1.0 and h(0.0) == 0.0
    x = np.linspace(-3, 3, 1001)
    np.testing.assert_array_equal(h(-x), -h(x))
    assert np.all(np.abs(h(x)) <= 1)
    assert np.all(h(x[np.abs(x) >= r]) == np.sign(x[np.abs(x) >= r]))
    eps = 1e-7
    assert abs((h(r + eps) - h(r - eps)) / (2 * eps)) <= 1e-10 * 1e3
    assert abs(h.deriv(r)) <= 1e-10
    inner = np.linspace(-0.09, 0.09, 31)
    fd = (h(inner + 1e-7) - h(inner - 1e-7)) / 2e-7
    np.testing.assert_allclose(fd, h.deriv(inner), rtol=1e-6)
    with pytest.raises(ConfigurationError):
        smoothed_sign(0.0)


def test_projection_reproduces_odd_polynomials():
    target = Polynomial([0, 0.5, 0, -0.25, 0, 0.01])
    for basis in ("monomial", "orthogonal"):
        q = project_odd(target, 7, basis=basis)
        x = np.linspace(-5, 5, 101)
        np.testing.assert_allclose(q(x), target(x), atol=1e-8 * np.abs(target(x)).max())
        assert q.errors["sobolev"] <= 1e-8
        assert np.all(q.odd_coeffs[3:] == pytest.approx(0, abs=1e-8))


def test_projection_degree_validation_and_basis_switch():
    with pytest.raises(ConfigurationError):
        project_odd(smoothed_sign(0.1), 4)
    with pytest.raises(IllConditionedError):
        project_odd(smoothed_sign(0.1), 81, basis="monomial")
    q = project_odd(smoothed_sign(0.1), 81)
    assert q.h_params["basis"] == "orthogonal"


def test_monomial_and_orthogonal_agree():
    h = smoothed_sign(0.5)
    a = project_odd(h, 11, basis="monomial")
    b = project_odd(h, 11, basis="orthogonal")
    x = np.linspace(-8, 8, 401)
    np.testing.assert_allclose(a(x), b(x), atol=1e-7)
    assert a.errors["sobolev"] == pytest.approx(b.errors["sobolev"], rel=1e-6)


def test_error_monotone_through_degree_41():
    h = smoothed_sign(0.1)
    degrees = list(range(1, 42, 2))
    prof = sobolev_error_profile(h, degrees)
    assert np.all(np.diff(prof) <= 0)
    e1 = project_odd(h, 1).errors["sobolev"]
    e21 = project_odd(h, 21).errors["sobolev"]
    assert e21 <= e1


def test_residual_orthogonality():
    h = smoothed_sign(0.1)
    for deg in (21, 41):
        q = project_odd(h, deg)
        ortho = residual_orthogonality(h, q)
        assert np.max(np.abs(ortho["normalized_monomials"])) <= 1e-8 * ortho["h_norm"]


def test_gram_positive_definite_to_41():
    assert gram_min_eigenvalue(41) > 0
    G = gram_matrix_exact(9, 40)
    assert all(G[i, j] == G[j, i] for i in range(5) for j in range(5))


@pytest.mark.xfail(strict=True, reason="best odd polynomial of degree 41 has sup error 0.52 on [0.1, 10]")
def test_degree_41_sup_error_example():
    assert project_odd(smoothed_sign(0.1), 41).errors["sup"] <= 0.1


def _minimax_lower_bound(degree: int, r: float = 0.1, R: float = 10.0, points: int = 1500) -> float:
    """Discrete minimax error of odd polynomials against sign on [r, R] by linear programming.

    The discrete optimum bounds the continuous one from below.
    """
    x = np.concatenate([np.linspace(r, 1, points // 2), np.linspace(1, R, points // 2)])
    cols = [C.chebval(x / R, [0] * k + [1]) for k in range(1, degree + 1, 2)]
    A = np.column_stack(cols)
    m = A.shape[1]
    # minimize t subject to |A c - 1| <= t
    c = np.zeros(m + 1)
    c[-1] = 1
    ub = np.block([[A, -np.ones((x.size, 1))], [-A, -np.ones((x.size, 1))]])
    rhs = np.concatenate([np.ones(x.size), -np.ones(x.size)])
    res = optimize.linprog(c, A_ub=ub, b_ub=rhs, bounds=[(None, None)] * m + [(0, None)], method="highs")
    assert res.status == 0
    return float(res.x[-1])


def test_sup_target_unreachable_by_any_polynomial_up_to_61():
    # the smoothed sign equals sign(x) on the range, so this bounds every odd polynomial
    assert _minimax_lower_bound(41) > 0.5
    assert _minimax_lower_bound(61) > 0.35


def test_sup_error_decreases_with_degree():
    h = smoothed_sign(0.1)
    sups = [project_odd(h, d).errors["sup"] for d in (1, 21, 41, 61)]
    assert sups[-1] < sups[0]
    assert all(s < 1.2 for s in sups[1:])


def test_gauss_product_examples():
    assert gauss_product_expectation(Polynomial([0, 0, 1])) == pytest.approx(1, abs=1e-12)
    assert gauss_product_expectation(Polynomial([0, 0, 0, 0, 1])) == pytest.approx(9, abs=1e-10)
    for d in range(7):
        val = gauss_product_expectation(Polynomial([0] * (2 * d) + [1]), degree=2 * d)
        assert abs(val - product_moment(d)) <= 1e-9 * product_moment(d)
    assert [product_moment(d) for d in range(4)] == [1, 1, 9, 225]
    with pytest.raises(ConfigurationError):
        gauss_product_expectation(Polynomial([1]), order=10, degree=30)


@settings(max_examples=30, deadline=None)
@given(coeffs=st.lists(st.floats(-5, 5), min_size=1, max_size=12))
def test_odd_polynomials_have_zero_product_mean(coeffs):
    p = Polynomial([0.0 if k % 2 == 0 else c for k, c in enumerate([0.0] + coeffs)])
    assert abs(gauss_product_expectation(p, degree=p.degree())) <= 1e-10


def test_projected_polynomials_have_zero_product_mean():
    for deg in (5, 21, 41, 61):
        q = project_odd(smoothed_sign(0.1), deg)
        assert abs(gauss_product_expectation(q, order=120, degree=q.degree)) <= 1e-10


def test_gauss_product_matches_density_integral():
    f = lambda x: np.cos(x) * np.exp(-0.1 * x * x)  # noqa: E731
    from nodal_lab.signpoly import product_density

    direct = 2 * integrate.quad(lambda x: f(x) * product_density(x), 0, 60, limit=400, points=[1e-6, 1])[0]
    assert gauss_product_expectation(f, order=120) == pytest.approx(direct, abs=1e-6)


def test_sign_polynomial_json_roundtrip():
    q = project_odd(smoothed_sign(0.2), 15)
    back = SignPolynomial.from_json(q.to_json())
    x = np.linspace(-3, 3, 41)
    np.testing.assert_array_equal(back(x), q(x))
    assert back.errors == q.errors and back.degree == 15
    r = project_odd(smoothed_sign(0.2), 81)
    assert np.array_equal(SignPolynomial.from_json(r.to_json())(x), r(x))


def test_holder_examples():
    out = holder_bound(1.5, -1, 1, 2)
    assert out["lhs"] == 0 and out["holds"]
    lin = holder_bound(Polynomial([0, 1]), 0, 1, 2)
    norm = math.sqrt(float(monomial_inner(1, 1)))
    assert lin["rhs"] == pytest.approx(norm * math.sqrt(W.psi(0.0)) / W.psi(2.0))
    assert lin["lhs"] == 1 and lin["holds"]


def test_holder_on_projected_polynomial():
    q = project_odd(smoothed_sign(0.1), 21)
    norm = math.sqrt(sobolev_inner(q, q))
    rng = np.random.default_rng(4)
    pts = np.sort(rng.uniform(-3, 3, size=(1000, 2)), axis=1)
    assert all(holder_bound_check(q, a, b, 3.0, norm=norm) for a, b in pts)


def test_hfunction_from_constant():
    f = HFunction(lambda x: np.sin(x), lambda x: np.cos(x))
    assert sobolev_inner(f, f, method="quad") == pytest.approx(sobolev_inner(f, f), rel=1e-8)
    with mpmath.workdps(30):
        assert float(monomial_inner(1, 1)) > 0
