# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Signatures mirror ``_pykernels`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, NAN

cnp.import_array()


def label_sign_components(const unsigned char[:, ::1] adj, const signed char[::1] signs):
    """Connected components of the same-sign subgraph by breadth-first search.

    Labels are numbered in order of each component's smallest vertex; vertices
    with sign 0 get label -1.
    """
    cdef Py_ssize_t n = adj.shape[0]
    cdef cnp.int64_t[::1] labels = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t start, head, tail, v, w
    cdef cnp.int64_t current = 0
    cdef signed char s
    for start in range(n):
        if signs[start] == 0 or labels[start] != -1:
            continue
        s = signs[start]
        labels[start] = current
        queue[0] = start
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            for w in range(n):
                if adj[v, w] and labels[w] == -1 and signs[w] == s:
                    labels[w] = current
                    queue[tail] = w
                    tail += 1
        current += 1
    return np.asarray(labels)


cdef inline double _secular(const double[::1] nu, const double[::1] z2, double inv_c,
                            Py_ssize_t origin, double tau) nogil:
    cdef Py_ssize_t j, m = nu.shape[0]
    cdef double acc = inv_c
    cdef double base = nu[origin]
    for j in range(m):
        acc += z2[j] / ((nu[j] - base) - tau)
    return acc


def secular_roots(const double[::1] nu, const double[::1] z2, double c, int max_iter=400):
    """Roots of ``1/c + sum_j z2_j / (nu_j - mu) = 0`` for ``c > 0``.

    ``nu`` must be strictly decreasing and ``z2`` positive.  Root ``k`` lies
    in ``(nu_k, nu_{k-1})`` (``(nu_0, nu_0 + c*sum z2]`` for ``k = 0``) and is
    returned as ``nu[origin[k]] + tau[k]`` with the origin at the closer pole.
    """
    cdef Py_ssize_t m = nu.shape[0], k, it
    cdef cnp.int64_t[::1] origin = np.empty(m, dtype=np.int64)
    cdef double[::1] tau = np.empty(m)
    cdef double inv_c = 1.0 / c
    cdef double total = 0.0, width, lo, hi, mid, fm
    cdef Py_ssize_t o
    for k in range(m):
        total += z2[k]
    for k in range(m):
        if k == 0:
            o = 0
            lo = 0.0
            hi = c * total
        else:
            width = nu[k - 1] - nu[k]
            fm = _secular(nu, z2, inv_c, k, 0.5 * width)
            if fm >= 0.0:
                o = k
                lo = 0.0
                hi = 0.5 * width
            else:
                o = k - 1
                lo = -0.5 * width
                hi = 0.0
        for it in range(max_iter):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _secular(nu, z2, inv_c, o, mid) >= 0.0:
                hi = mid
            else:
                lo = mid
        origin[k] = o
        tau[k] = 0.5 * (lo + hi)
    return np.asarray(origin), np.asarray(tau)


cdef inline void _green_entries(const double[::1] mu, const double[::1] a1, const double[::1] a2,
                                double E, double* g11, double* g12, double* g22) nogil:
    cdef Py_ssize_t j, n = mu.shape[0]
    cdef double r, s11 = 0.0, s12 = 0.0, s22 = 0.0
    for j in range(n):
        r = 1.0 / (mu[j] - E)
        s11 += a1[j] * a1[j] * r
        s12 += a1[j] * a2[j] * r
        s22 += a2[j] * a2[j] * r
    g11[0] = s11
    g12[0] = s12
    g22[0] = s22


cdef inline double _branch(const double[::1] mu, const double[::1] a1, const double[::1] a2,
                           double d11, double d12, double d22, double E, int upper) nogil:
    cdef double g11, g12, g22, m11, m12, m22, half_tr, disc
    _green_entries(mu, a1, a2, E, &g11, &g12, &g22)
    m11 = g11 - d11 + E
    m12 = g12 - d12
    m22 = g22 - d22 + E
    half_tr = 0.5 * (m11 + m22)
    disc = sqrt(0.25 * (m11 - m22) * (m11 - m22) + m12 * m12)
    if upper:
        return half_tr + disc
    return half_tr - disc


def green_entries(const double[::1] mu, const double[::1] a1, const double[::1] a2, double E):
    cdef double g11, g12, g22
    _green_entries(mu, a1, a2, E, &g11, &g12, &g22)
    return g11, g12, g22


def detection_branch(const double[::1] mu, const double[::1] a1, const double[::1] a2,
                     double d11, double d12, double d22, double E, int upper):
    return _branch(mu, a1, a2, d11, d12, d22, E, upper)


def detection_branch_root(const double[::1] mu, const double[::1] a1, const double[::1] a2,
                          double d11, double d12, double d22, double lo, double hi,
                          int upper, int probes=8, int max_iter=400):
    """Zero of one eigenvalue branch of the 2x2 detection matrix on [lo, hi].

    Both branches increase strictly between poles, so a sign scan over
    ``probes`` points brackets the only possible zero.  Returns NaN when the
    branch has no zero on the interval.
    """
    cdef int i, it
    cdef double a, b, fa, fb, mid, fm
    cdef double step = (hi - lo) / (probes - 1)
    a = lo
    fa = _branch(mu, a1, a2, d11, d12, d22, a, upper)
    if fa == 0.0:
        return a
    for i in range(1, probes):
        b = hi if i == probes - 1 else lo + i * step
        fb = _branch(mu, a1, a2, d11, d12, d22, b, upper)
        if fb == 0.0:
            return b
        if (fa < 0.0) != (fb < 0.0):
            break
        a = b
        fa = fb
    else:
        return NAN
    for it in range(max_iter):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = _branch(mu, a1, a2, d11, d12, d22, mid, upper)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (fa < 0.0):
            a = mid
            fa = fm
        else:
            b = mid
    return 0.5 * (a + b)
