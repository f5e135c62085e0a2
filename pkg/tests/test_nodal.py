import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodal_lab.ensembles import AdjacencyMatrix, centered_wigner, sample_gnp
from nodal_lab.errors import DataError
from nodal_lab.nodal import (
    NodalDecomposition,
    count_and_balance,
    decomposition_from_signs,
    nodal_domains,
    pair_sign_bruteforce,
    pair_sign_expectation,
    sign_sum,
    sign_vector,
    verify_decomposition,
)
from nodal_lab.spectral import eigendecompose


def path(n):
    return AdjacencyMatrix.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return AdjacencyMatrix.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def _enumerate_pairs(signs):
    s = [int(x) for x in signs if x]
    pairs = list(itertools.combinations(s, 2))
    return Fraction(sum(a * b for a, b in pairs), len(pairs))


def test_sign_vector_examples():
    assert sign_vector(np.ones(3) / math.sqrt(3)).tolist() == [1, 1, 1]
    assert sign_vector(np.array([1, 0, -1]) / math.sqrt(2), 1e-12).tolist() == [1, 0, -1]
    assert sign_vector(np.array([1.0, 1e-14, -1.0])).tolist() == [1, 0, -1]
    with pytest.raises(DataError):
        sign_vector(np.array([1.0, np.nan]))


def test_all_positive_connected_graph_single_domain():
    dec = nodal_domains(cycle(6), np.ones(6) / math.sqrt(6))
    assert dec.domain_count == 1


def test_path_three_eigenvector():
    spec = eigendecompose(path(3).as_float())
    v = spec.vector(3)
    np.testing.assert_allclose(np.abs(v), np.abs([1, -math.sqrt(2), 1]) / 2, atol=1e-12)
    dec = nodal_domains(path(3), v)
    assert dec.domain_count == 3
    pos = [d for d in dec.domains if dec.signs[d[0]] > 0]
    neg = [d for d in dec.domains if dec.signs[d[0]] < 0]
    if dec.signs[1] > 0:
        pos, neg = neg, pos
    assert sorted(pos) == [(0,), (2,)] and neg == [(1,)]


def test_cycle_alternating_singletons():
    dec = nodal_domains(cycle(4), np.array([1, -1, 1, -1]) / 2)
    assert dec.domains == ((0,), (1,), (2,), (3,))


def test_dimension_mismatch():
    with pytest.raises(DataError):
        nodal_domains(cycle(4), np.ones(5))


def test_disconnected_graph_never_merges_components():
    a = AdjacencyMatrix.from_edges(4, [(0, 1), (2, 3)])
    dec = nodal_domains(a, np.ones(4) / 2)
    assert dec.domains == ((0, 1), (2, 3))


def test_balance_examples():
    half = decomposition_from_signs(cycle(4), np.array([1, 1, -1, -1]))
    assert count_and_balance(half)["balance"] == 0.5
    full = decomposition_from_signs(cycle(4), np.ones(4, dtype=np.int8))
    assert count_and_balance(full) == {"domain_count": 1, "balance": 1.0}


def test_pair_sign_examples():
    two = decomposition_from_signs(path(2), np.array([1, -1]))
    assert pair_sign_expectation(two) == -1
    four = decomposition_from_signs(path(4), np.array([1, 1, 1, -1]))
    assert pair_sign_expectation(four) == 0
    allp = decomposition_from_signs(path(5), np.ones(5, dtype=np.int8))
    assert pair_sign_expectation(allp) == 1


def test_pair_sign_with_zeros_warns():
    dec = decomposition_from_signs(path(4), np.array([1, 0, -1, 1]))
    with pytest.warns(RuntimeWarning):
        assert pair_sign_expectation(dec) == _enumerate_pairs(dec.signs)


@settings(max_examples=60, deadline=None)
@given(signs=st.lists(st.sampled_from([-1, 1]), min_size=2, max_size=200))
def test_pair_sign_matches_enumeration(signs):
    s = np.array(signs, dtype=np.int8)
    dec = decomposition_from_signs(AdjacencyMatrix(np.zeros((s.size, s.size), dtype=np.uint8)), s)
    exact = pair_sign_expectation(dec)
    assert exact == _enumerate_pairs(s)
    assert exact == pair_sign_bruteforce(s)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 50), seed=st.integers(0, 2**32))
def test_sign_sum_identity(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    s = sign_vector(v)
    total = sign_sum(v)
    cross = sum(int(s[i]) * int(s[j]) for i in range(n) for j in range(n) if i != j)
    assert total * total == n + cross
    assert abs(total) == abs(int((s > 0).sum()) - int((s < 0).sum()))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 60), p=st.floats(0.02, 0.9), seed=st.integers(0, 2**32))
def test_decomposition_invariants(n, p, seed):
    a = sample_gnp(n, p, seed)
    rng = np.random.default_rng(seed)
    signs = rng.integers(-1, 2, size=n).astype(np.int8)
    dec = decomposition_from_signs(a, signs)
    assert verify_decomposition(a, dec)
    assert dec.p_size + dec.n_size + dec.zero_count == n
    covered = sorted(v for d in dec.domains for v in d)
    assert covered == sorted(np.nonzero(signs)[0].tolist())


def test_verify_detects_bad_decomposition():
    a = path(3)
    bad = NodalDecomposition(np.array([1, 1, 1], dtype=np.int8), ((0,), (1, 2)), 3, 0, 0)
    assert not verify_decomposition(a, bad)
    split = NodalDecomposition(np.array([1, -1, 1], dtype=np.int8), ((0, 2), (1,)), 2, 1, 0)
    assert not verify_decomposition(a, split)


def test_json_roundtrip():
    dec = nodal_domains(cycle(6), np.array([1, 2, -1, -3, 1, 0.5]))
    back = NodalDecomposition.from_json(dec.to_json())
    assert back.domains == dec.domains and np.array_equal(back.signs, dec.signs)
    assert (back.p_size, back.n_size, back.zero_count) == (dec.p_size, dec.n_size, dec.zero_count)


def test_leading_eigenvector_single_domain():
    a = sample_gnp(200, 0.5, 8)
    spec = eigendecompose(a.as_float())
    assert nodal_domains(a, spec.vector(1)).domain_count == 1


def test_bulk_eigenvector_two_domains_small_campaign():
    n, p = 300, 0.5
    count = 0
    for seed in range(5):
        a = sample_gnp(n, p, seed)
        spec = eigendecompose(centered_wigner(a, p))
        dec = nodal_domains(a, spec.vector(n // 2))
        count += dec.domain_count == 2 and dec.zero_count == 0
    assert count >= 4
