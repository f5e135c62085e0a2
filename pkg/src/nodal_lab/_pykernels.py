"""Pure numpy/scipy versions of the compiled kernels in ``_ckernels.pyx``.

Signatures match.  Component labels are identical; bisection roots agree
to a few ulps, since numpy sums the secular terms in a different order.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


def label_sign_components(adj: np.ndarray, signs: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    signs = np.asarray(signs, dtype=np.int8)
    same = (signs[:, None] == signs[None, :]) & (signs[:, None] != 0)
    graph = csr_matrix(np.asarray(adj, dtype=bool) & same)
    _, raw = connected_components(graph, directed=False)
    labels = np.full(n, -1, dtype=np.int64)
    # relabel in order of smallest vertex to match the BFS kernel
    mapping: dict[int, int] = {}
    for v in range(n):
        if signs[v] == 0:
            continue
        labels[v] = mapping.setdefault(int(raw[v]), len(mapping))
    return labels


def _secular_batch(nu, z2, inv_c, origin, tau):
    diff = (nu[None, :] - nu[origin][:, None]) - tau[:, None]
    return inv_c + (z2[None, :] / diff).sum(axis=1)


def secular_roots(nu: np.ndarray, z2: np.ndarray, c: float, max_iter: int = 400):
    nu = np.asarray(nu, dtype=np.float64)
    z2 = np.asarray(z2, dtype=np.float64)
    m = nu.size
    inv_c = 1.0 / c
    total = 0.0
    for v in z2:
        total += float(v)
    origin = np.arange(m, dtype=np.int64)
    lo = np.zeros(m)
    hi = np.zeros(m)
    if m:
        hi[0] = c * total
    if m > 1:
        k = np.arange(1, m)
        width = nu[k - 1] - nu[k]
        fm = _secular_batch(nu, z2, inv_c, k, 0.5 * width)
        right = fm >= 0.0
        hi[1:] = np.where(right, 0.5 * width, 0.0)
        lo[1:] = np.where(right, 0.0, -0.5 * width)
        origin[1:] = np.where(right, k, k - 1)
    active = np.ones(m, dtype=bool)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        active &= (mid > lo) & (mid < hi)
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        f = _secular_batch(nu, z2, inv_c, origin[idx], mid[idx])
        up = f >= 0.0
        hi[idx[up]] = mid[idx[up]]
        lo[idx[~up]] = mid[idx[~up]]
    return origin, 0.5 * (lo + hi)


def green_entries(mu, a1, a2, E):
    r = 1.0 / (np.asarray(mu) - E)
    return float(np.dot(a1 * a1, r)), float(np.dot(a1 * a2, r)), float(np.dot(a2 * a2, r))


def detection_branch(mu, a1, a2, d11, d12, d22, E, upper):
    g11, g12, g22 = green_entries(mu, a1, a2, E)
    m11 = g11 - d11 + E
    m12 = g12 - d12
    m22 = g22 - d22 + E
    half_tr = 0.5 * (m11 + m22)
    disc = math.sqrt(0.25 * (m11 - m22) ** 2 + m12 * m12)
    return half_tr + disc if upper else half_tr - disc


def detection_branch_root(mu, a1, a2, d11, d12, d22, lo, hi, upper, probes=8, max_iter=400):
    f = lambda E: detection_branch(mu, a1, a2, d11, d12, d22, E, upper)  # noqa: E731
    step = (hi - lo) / (probes - 1)
    a, fa = lo, f(lo)
    if fa == 0.0:
        return a
    for i in range(1, probes):
        b = hi if i == probes - 1 else lo + i * step
        fb = f(b)
        if fb == 0.0:
            return b
        if (fa < 0.0) != (fb < 0.0):
            break
        a, fa = b, fb
    else:
        return math.nan
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (fa < 0.0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)
