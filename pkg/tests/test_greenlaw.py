import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodal_lab.deloc import isotropic_law_residual
from nodal_lab.ensembles import lindeberg_increments, lindeberg_matrix, sample_goe
from nodal_lab.errors import ConfigurationError, DomainError
from nodal_lab.greenlaw import (
    TEST_FUNCTIONS,
    ComparisonStatistic,
    SweepResult,
    green_residual,
    integrated_density,
    interpolation_local_law_sweep,
    lindeberg_gap,
    path_checkpoints,
    rank_one_update,
    resolvent,
    resolvent_identity_residual,
    resolvent_rank_one_expand,
    sweep_energies,
    sweep_eta,
    sweep_trial,
)
from nodal_lab.spectral import eigendecompose, stieltjes


def _sym(n, rng):
    a = rng.standard_normal((n, n))
    return (a + a.T) / math.sqrt(2 * n)


def test_expansion_with_zero_perturbation_is_identity(rng):
    a = _sym(6, rng)
    z = 0.3 + 0.2j
    R = resolvent(a, z)
    assert np.array_equal(resolvent_rank_one_expand(R, 0.0, 5, 2, z), R)


def test_expansion_order_five_small_h(rng):
    a = _sym(8, rng)
    z = 1.5 + 0.5j
    R = resolvent(a, z)
    e = np.zeros(8)
    e[3] = 1
    direct = resolvent(a + 1e-3 * np.outer(e, e), z)
    assert np.abs(resolvent_rank_one_expand(R, 1e-3, 5, 3, z) - direct).max() <= 1e-12
    exact = resolvent_rank_one_expand(R, 1e-3, 5, 3, z, remainder=True)
    assert np.abs(exact - direct).max() <= 1e-14
    np.testing.assert_allclose(rank_one_update(R, 1e-3, 3), direct, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), h=st.floats(-0.5, 0.5), k=st.integers(1, 8), E=st.floats(-3, 3),
       eta=st.floats(0.05, 2))
def test_expansion_remainder_form_is_exact(seed, h, k, E, eta):
    rng = np.random.default_rng(seed)
    n = 7
    a = _sym(n, rng)
    z = complex(E, eta)
    p = int(rng.integers(n))
    R = resolvent(a, z)
    e = np.zeros(n)
    e[p] = 1
    direct = resolvent(a + h * np.outer(e, e), z)
    got = resolvent_rank_one_expand(R, h, k, p, z, remainder=True)
    assert np.abs(got - direct).max() <= 1e-9 * max(1.0, np.abs(direct).max())


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), h=st.floats(-2, 2), E=st.floats(-3, 3), eta=st.floats(0.01, 2))
def test_resolvent_identity(seed, h, E, eta):
    rng = np.random.default_rng(seed)
    a = _sym(10, rng)
    b = np.zeros((10, 10))
    i = int(rng.integers(10))
    b[i, i] = h
    assert resolvent_identity_residual(a, b, complex(E, eta)) <= 1e-12


def test_real_spectral_parameter_rejected(rng):
    a = _sym(4, rng)
    with pytest.raises(DomainError):
        resolvent(a, 0.5)
    with pytest.raises(DomainError):
        resolvent_rank_one_expand(np.eye(4), 0.1, 2, 0, 1.0)
    with pytest.raises(ConfigurationError):
        resolvent_rank_one_expand(np.eye(4), 0.1, 0, 0, 1j)


def test_sweep_endpoint_equals_base_residual():
    n = 40
    base = sample_goe(n, 1, zero_diagonal=True)
    inc = lindeberg_increments(n, 2)
    E = sweep_energies(n)
    eta = sweep_eta(n)
    res = interpolation_local_law_sweep(base, inc, E, betas=[0], gammas=[0], growth=False)
    ref = isotropic_law_residual(eigendecompose(base), energies=E, directions=np.eye(n), eta=eta)
    assert res.rows[0]["residual"] == pytest.approx(ref, rel=1e-12)
    assert res.rows[0]["residual"] == pytest.approx(green_residual(base, E, eta)[0], rel=1e-15)


def test_sweep_structure_and_serialization():
    n = 24
    res = sweep_trial(n, 5)
    gam = path_checkpoints(n)
    assert gam == [0, 6, 12, 18, 24]
    assert len(res.rows) == n * len(gam)
    assert len(res.growth) == n * (len(gam) - 1)
    csv = res.to_csv().splitlines()
    assert csv[0] == "n,beta,gamma,E,residual" and len(csv) == len(res.rows) + 1
    s = res.summary()
    assert {"max_residual", "pass_fraction", "growth_fraction"} <= set(s)
    assert isinstance(res, SweepResult) and '"max_residual"' in res.to_json()
    with pytest.raises(ConfigurationError):
        interpolation_local_law_sweep(sample_goe(401, 1, zero_diagonal=True), np.zeros((401, 401)))


def test_sweep_path_stitches_bit_exactly():
    n = 16
    base = sample_goe(n, 3, zero_diagonal=True)
    inc = lindeberg_increments(n, 4)
    a = interpolation_local_law_sweep(base, inc, betas=[2], gammas=[n], growth=False).rows[0]["residual"]
    b = interpolation_local_law_sweep(base, inc, betas=[3], gammas=[0], growth=False).rows[0]["residual"]
    assert a == b
    assert np.array_equal(lindeberg_matrix(base, inc, 2, n).entries, lindeberg_matrix(base, inc, 3, 0).entries)


@pytest.mark.slow
def test_sweep_growth_factor_small_n():
    res = sweep_trial(120, 7, betas=range(0, 120, 6))
    assert res.growth_fraction >= 0.95


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="at n=200, eta = n^-0.82 lies below the edge spacing and Im G_ii near the top eigenvalue exceeds 1")
def test_sweep_residual_example_n200():
    res = sweep_trial(200, 3, betas=range(0, 200, 20), growth=False)
    assert res.pass_fraction >= 0.9


def test_integrated_density_methods_agree():
    lam = np.linalg.eigvalsh(sample_goe(60, 3).entries)
    stat = ComparisonStatistic.at_edge(60)
    closed = integrated_density(lam, stat.E1, stat.E2, stat.eta)
    assert integrated_density(lam, stat.E1, stat.E2, stat.eta, "quad") == pytest.approx(closed, abs=1e-8)
    assert integrated_density(lam, stat.E1, stat.E2, stat.eta, "grid:200001") == pytest.approx(closed, abs=1e-8)
    with pytest.raises(DomainError):
        integrated_density(lam, 0, 1, 0.0)


def test_stieltjes_imaginary_part_positive():
    spec = eigendecompose(sample_goe(50, 1))
    for E in np.linspace(-3, 3, 31):
        for eta in (1e-4, 1e-2, 1):
            assert stieltjes(spec, complex(E, eta)).imag > 0


@pytest.mark.parametrize("name", sorted(TEST_FUNCTIONS))
def test_catalog_derivative_bounds(name):
    fn, (b0, b1, b2) = TEST_FUNCTIONS[name]
    x = np.linspace(-30, 30, 600001)
    y = fn(x)
    h = x[1] - x[0]
    d1 = np.gradient(y, h)
    d2 = np.gradient(d1, h)
    assert np.abs(y).max() <= b0 + 1e-12
    assert np.abs(d1).max() <= b1 * (1 + 1e-3)
    assert np.abs(d2[2:-2]).max() <= b2 * (1 + 1e-2)
    assert np.abs(d1).max() >= 0.95 * b1


def test_comparison_statistic_validation():
    with pytest.raises(ConfigurationError):
        ComparisonStatistic(1.9, 2.1, 0.01, "tanh")
    stat = ComparisonStatistic.at_edge(300)
    assert stat.E1 < 2 < stat.E2
    assert math.isfinite(stat.value(np.linalg.eigvalsh(sample_goe(300, 1).entries)))


def test_identical_ensembles_have_zero_gap():
    stat = ComparisonStatistic.at_edge(50)
    g = lindeberg_gap(stat, "goe", "goe", 50, 20, 3)
    assert g.gap == 0.0 and g.se == 0.0


@pytest.mark.slow
def test_gap_does_not_grow_with_n():
    stat100 = ComparisonStatistic.at_edge(100)
    stat300 = ComparisonStatistic.at_edge(300)
    g100 = lindeberg_gap(stat100, "goe", "goe_zero_diagonal", 100, 300, 11)
    g300 = lindeberg_gap(stat300, "goe", "goe_zero_diagonal", 300, 300, 11)
    assert g300.gap <= g100.gap + 3 * math.hypot(g100.se, g300.se)
