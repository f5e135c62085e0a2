"""Nodal domains of eigenvectors on graphs and exact pair-sign statistics."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .ensembles import AdjacencyMatrix
from .errors import ConfigurationError, DataError

DEFAULT_ZERO_TOL = 1e-12


def sign_vector(v: np.ndarray, zero_tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
    """Signs in {-1, 0, +1}; entries below ``zero_tol * max|v|`` count as 0."""
    v = np.asarray(v, dtype=np.float64)
    if not np.isfinite(v).all():
        raise DataError("vector has non-finite entries")
    if v.size == 0:
        return np.zeros(0, dtype=np.int8)
    cutoff = zero_tol * np.abs(v).max()
    s = np.sign(v).astype(np.int8)
    s[np.abs(v) <= cutoff] = 0
    return s


@dataclass(frozen=True)
class NodalDecomposition:
    signs: np.ndarray
    domains: tuple
    p_size: int
    n_size: int
    zero_count: int

    @property
    def n(self) -> int:
        return int(self.signs.size)

    @property
    def domain_count(self) -> int:
        return len(self.domains)

    def to_json(self) -> str:
        return json.dumps(
            {
                "signs": [int(s) for s in self.signs],
                "domains": [list(map(int, d)) for d in self.domains],
                "p_size": self.p_size,
                "n_size": self.n_size,
                "zero_count": self.zero_count,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "NodalDecomposition":
        d = json.loads(text)
        return cls(
            signs=np.asarray(d["signs"], dtype=np.int8),
            domains=tuple(tuple(x) for x in d["domains"]),
            p_size=int(d["p_size"]),
            n_size=int(d["n_size"]),
            zero_count=int(d["zero_count"]),
        )


def decomposition_from_signs(A: AdjacencyMatrix, signs: np.ndarray) -> NodalDecomposition:
    signs = np.asarray(signs, dtype=np.int8)
    if signs.shape != (A.n,):
        raise DataError(f"sign vector has length {signs.size}, graph has {A.n} vertices")
    labels = kernels.label_sign_components(A.entries, signs)
    count = int(labels.max()) + 1 if labels.size and labels.max() >= 0 else 0
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(count + 1))
    domains = tuple(tuple(int(v) for v in order[bounds[k] : bounds[k + 1]]) for k in range(count))
    return NodalDecomposition(
        signs=signs,
        domains=domains,
        p_size=int((signs > 0).sum()),
        n_size=int((signs < 0).sum()),
        zero_count=int((signs == 0).sum()),
    )


def nodal_domains(A: AdjacencyMatrix, v: np.ndarray, zero_tol: float = DEFAULT_ZERO_TOL) -> NodalDecomposition:
    """Connected components of constant nonzero sign of ``v`` on the graph ``A``.

    Domains are sorted vertex tuples listed in order of their smallest vertex.
    Zero-sign vertices belong to no domain.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (A.n,):
        raise DataError(f"vector has length {v.size}, graph has {A.n} vertices")
    return decomposition_from_signs(A, sign_vector(v, zero_tol))


def verify_decomposition(A: AdjacencyMatrix, dec: NodalDecomposition) -> bool:
    """Independent re-check: partition, sign-constancy, connectivity and maximality."""
    seen = np.zeros(dec.n, dtype=bool)
    adj = A.entries.astype(bool)
    for dom in dec.domains:
        idx = np.asarray(dom)
        if seen[idx].any():
            return False
        seen[idx] = True
        s = dec.signs[idx]
        if s[0] == 0 or np.any(s != s[0]):
            return False
        # depth-first reachability inside the domain
        member = np.zeros(dec.n, dtype=bool)
        member[idx] = True
        reached = {int(idx[0])}
        stack = [int(idx[0])]
        while stack:
            u = stack.pop()
            for w in np.nonzero(adj[u] & member)[0]:
                if int(w) not in reached:
                    reached.add(int(w))
                    stack.append(int(w))
        if len(reached) != idx.size:
            return False
        # no same-sign neighbour outside the domain
        outside = adj[idx].any(axis=0) & ~member & (dec.signs == s[0])
        if outside.any():
            return False
    return bool(np.array_equal(seen, dec.signs != 0))


def count_and_balance(dec: NodalDecomposition) -> dict:
    return {
        "domain_count": dec.domain_count,
        "balance": max(dec.p_size, dec.n_size) / dec.n,
    }


def pair_sign_expectation(dec: NodalDecomposition) -> Fraction:
    """Exact mean of ``sign(v_k v_l)`` over uniformly random distinct pairs.

    With zero coordinates present the average runs over pairs of nonzero
    vertices and a warning is issued.
    """
    P, N = dec.p_size, dec.n_size
    m = P + N
    if dec.n < 2:
        raise ConfigurationError("pair statistics need n >= 2")
    if dec.zero_count:
        warnings.warn(
            f"{dec.zero_count} zero coordinates excluded from the pair average", RuntimeWarning, stacklevel=2
        )
    if m < 2:
        raise ConfigurationError("fewer than two nonzero coordinates")
    return Fraction(math.comb(P, 2) + math.comb(N, 2) - P * N, math.comb(m, 2))


def pair_sign_bruteforce(signs: np.ndarray) -> Fraction:
    s = [int(x) for x in signs if x != 0]
    total = sum(s[i] * s[j] for i in range(len(s)) for j in range(i + 1, len(s)))
    return Fraction(total, math.comb(len(s), 2))


def sign_sum(v: np.ndarray, zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    return int(sign_vector(v, zero_tol).astype(np.int64).sum())
