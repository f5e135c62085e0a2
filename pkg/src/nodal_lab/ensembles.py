"""Random-matrix ensembles: G(n,p) adjacency matrices, their normalized and
centered Wigner forms, GOE, and the diagonal Lindeberg interpolation path."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._rng import make_rng
from .errors import ConfigurationError, DataError

ENSEMBLES = ("gnp", "goe", "lindeberg")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Symmetric 0/1 matrix with zero diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DataError(f"adjacency must be square, got shape {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise DataError("adjacency entries must be 0 or 1")
        if not np.array_equal(a, a.T):
            raise DataError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise DataError("adjacency must have zero diagonal")
        object.__setattr__(self, "entries", _frozen(a.astype(np.uint8)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def edge_list(self) -> np.ndarray:
        """Edges as an (m, 2) array of pairs i < j, lexicographically sorted."""
        i, j = np.nonzero(np.triu(self.entries, 1))
        return np.column_stack([i, j])

    @property
    def edge_count(self) -> int:
        return int(np.triu(self.entries, 1).sum())

    @classmethod
    def from_edges(cls, n: int, edges) -> "AdjacencyMatrix":
        a = np.zeros((n, n), dtype=np.uint8)
        for i, j in edges:
            if i == j:
                raise DataError(f"self-loop at vertex {i}")
            a[i, j] = a[j, i] = 1
        return cls(a)

    def as_float(self) -> np.ndarray:
        return self.entries.astype(np.float64)


@dataclass(frozen=True)
class SymmetricMatrix:
    """Real symmetric matrix; symmetry is checked bit-exactly."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DataError(f"matrix must be square, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise DataError("matrix has non-finite entries")
        if not np.array_equal(a, a.T):
            raise DataError("matrix is not exactly symmetric")
        object.__setattr__(self, "entries", _frozen(a))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def principal_minor(self, remove) -> "SymmetricMatrix":
        """Principal submatrix with the given rows and columns removed."""
        keep = np.setdiff1d(np.arange(self.n), np.atleast_1d(remove))
        return SymmetricMatrix(self.entries[np.ix_(keep, keep)])


@dataclass(frozen=True)
class BlockDecomposition:
    """``S = [[D, W^T], [W, B]]`` with ``D`` of size 2x2."""

    D: np.ndarray
    W: np.ndarray
    B: np.ndarray

    def reassemble(self) -> np.ndarray:
        n = self.B.shape[0] + 2
        out = np.empty((n, n))
        out[:2, :2] = self.D
        out[2:, :2] = self.W
        out[:2, 2:] = self.W.T
        out[2:, 2:] = self.B
        return out


@dataclass(frozen=True)
class EnsembleConfig:
    n: int
    p: float = 0.5
    seed: int = 0
    ensemble: str = "gnp"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise ConfigurationError(f"unknown ensemble {self.ensemble!r}; expected one of {ENSEMBLES}")
        if int(self.n) < 2:
            raise ConfigurationError(f"n must be >= 2, got {self.n}")
        if not 0.0 < float(self.p) < 1.0:
            raise ConfigurationError(f"p must lie in (0, 1), got {self.p}")

    def to_json(self) -> str:
        d = asdict(self)
        if not d["extra"]:
            del d["extra"]
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EnsembleConfig":
        d = json.loads(text)
        unknown = set(d) - {"n", "p", "seed", "ensemble", "extra"}
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def sample(self):
        if self.ensemble == "gnp":
            return sample_gnp(self.n, self.p, self.seed)
        if self.ensemble == "goe":
            return sample_goe(self.n, self.seed)
        rng = make_rng(self.seed)
        base = sample_goe(self.n, rng, zero_diagonal=True)
        return base, lindeberg_increments(self.n, rng)


def _check_n(n, minimum=2):
    if int(n) != n or n < minimum:
        raise ConfigurationError(f"size must be an integer >= {minimum}, got {n}")


def sample_gnp(n: int, p: float, seed) -> AdjacencyMatrix:
    """Adjacency matrix of an Erdos-Renyi graph G(n, p).

    Each pair ``i < j`` is drawn from one uniform variate of the stream, in
    row-major order of the strict upper triangle.
    """
    _check_n(n)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ConfigurationError(f"p must lie in [0, 1], got {p}")
    rng = make_rng(seed)
    iu = np.triu_indices(n, 1)
    a = np.zeros((n, n), dtype=np.uint8)
    a[iu] = rng.random(iu[0].size) < p
    a |= a.T
    return AdjacencyMatrix(a)


def _shift_constants(n: int, p: float):
    if not 0.0 < p < 1.0:
        raise ConfigurationError(f"p must lie in (0, 1) for normalization, got {p}")
    scale = 1.0 / math.sqrt(p * (1.0 - p) * n)
    diag_shift = math.sqrt(p / ((1.0 - p) * n))
    rank_one = math.sqrt(p * n / (1.0 - p))
    return scale, diag_shift, rank_one


def normalize_shifted(A: AdjacencyMatrix, p: float) -> SymmetricMatrix:
    """``A / sqrt(p(1-p)n) + sqrt(p/((1-p)n)) I``: the centered Wigner matrix
    plus the rank-one shift ``sqrt(pn/(1-p)) 1 1^T``.

    The identity term only moves every eigenvalue by the same amount, so the
    eigenvectors and their order are those of the scaled adjacency matrix.
    """
    scale, diag_shift, _ = _shift_constants(A.n, p)
    out = A.as_float() * scale
    out[np.diag_indices(A.n)] = diag_shift
    return SymmetricMatrix(out)


def centered_wigner(A: AdjacencyMatrix, p: float) -> SymmetricMatrix:
    """Centered form ``H``: zero diagonal, off-diagonal entries
    ``sqrt((1-p)/p)/sqrt(n)`` on edges and ``-sqrt(p/(1-p))/sqrt(n)`` elsewhere."""
    n = A.n
    if not 0.0 < p < 1.0:
        raise ConfigurationError(f"p must lie in (0, 1), got {p}")
    hi = math.sqrt((1.0 - p) / p) / math.sqrt(n)
    lo = -math.sqrt(p / (1.0 - p)) / math.sqrt(n)
    h = np.where(A.entries == 1, hi, lo)
    h[np.diag_indices(n)] = 0.0
    return SymmetricMatrix(h)


def rank_one_strength(n: int, p: float) -> float:
    """Coefficient ``sqrt(pn/(1-p))`` of the all-ones projector."""
    return _shift_constants(n, p)[2]


def sample_goe(n: int, seed, *, zero_diagonal: bool = False) -> SymmetricMatrix:
    """GOE with off-diagonal variance 1/n and diagonal variance 2/n.

    Off-diagonal entries are drawn before the diagonal, so the zero-diagonal
    variant with the same seed shares every off-diagonal entry.
    """
    _check_n(n)
    rng = make_rng(seed)
    iu = np.triu_indices(n, 1)
    w = np.zeros((n, n))
    w[iu] = rng.standard_normal(iu[0].size) / math.sqrt(n)
    w = w + w.T
    diag = rng.standard_normal(n) * math.sqrt(2.0 / n)
    if not zero_diagonal:
        w[np.diag_indices(n)] = diag
    return SymmetricMatrix(w)


def block_decompose(S: SymmetricMatrix) -> BlockDecomposition:
    if S.n < 4:
        raise ConfigurationError(f"block decomposition needs n >= 4, got {S.n}")
    a = S.entries
    return BlockDecomposition(
        D=_frozen(a[:2, :2].copy()), W=_frozen(a[2:, :2].copy()), B=_frozen(a[2:, 2:].copy())
    )


def lindeberg_increments(n: int, seed) -> np.ndarray:
    """``n x n`` array of i.i.d. N(0, 2/n^2) draws; row ``j`` is ``h_{j+1, .}``."""
    _check_n(n)
    rng = make_rng(seed)
    return rng.standard_normal((n, n)) * (math.sqrt(2.0) / n)


def lindeberg_diagonal(increments: np.ndarray, beta: int, gamma: int) -> np.ndarray:
    n = increments.shape[0]
    if not (0 <= beta <= n and 0 <= gamma <= n):
        raise ConfigurationError(f"path index out of range: beta={beta}, gamma={gamma}, n={n}")
    if beta == n and gamma > 0:
        raise ConfigurationError("gamma must be 0 when beta == n")
    diag = np.zeros(n)
    # sequential accumulation keeps W_{b,n} == W_{b+1,0} bit for bit
    for j in range(beta):
        diag = diag + increments[j]
    if gamma:
        step = np.zeros(n)
        step[:gamma] = increments[beta, :gamma]
        diag = diag + step
    return diag


def lindeberg_matrix(base: SymmetricMatrix, increments: np.ndarray, beta: int, gamma: int) -> SymmetricMatrix:
    """Matrix ``W_{beta,gamma}`` of the diagonal interpolation path.

    Off-diagonal entries equal ``base`` (which must have zero diagonal);
    diagonal entry ``i`` is ``sum_{j<=beta} h_{j,i}`` plus ``h_{beta+1,i}``
    when ``i <= gamma`` (1-based indices).
    """
    increments = np.asarray(increments, dtype=np.float64)
    if increments.shape != (base.n, base.n):
        raise DataError(f"increments must have shape {(base.n, base.n)}, got {increments.shape}")
    if np.any(np.diag(base.entries) != 0):
        raise DataError("path base must have zero diagonal")
    w = base.entries.copy()
    w[np.diag_indices(base.n)] = lindeberg_diagonal(increments, beta, gamma)
    return SymmetricMatrix(w)
