"""Eigendecomposition, Green functions, Stieltjes transforms and semicircle
reference quantities."""
from __future__ import annotations

import hashlib
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ensembles import SymmetricMatrix
from .errors import DataError, DomainError, NumericError

DEFAULT_EPS_LR = 0.05
MAX_DENSE_N = 4096
_MAGIC = b"NLSPEC1\n"


@dataclass(frozen=True)
class ComplexPoint:
    """Spectral parameter ``z = E + i*eta`` with ``eta > 0``."""

    E: float
    eta: float

    def __post_init__(self):
        if not (self.eta > 0.0) or not math.isfinite(self.eta):
            raise DomainError(f"imaginary part must be positive, got eta={self.eta}")
        if not math.isfinite(self.E):
            raise DomainError(f"energy must be finite, got {self.E}")

    @property
    def z(self) -> complex:
        return complex(self.E, self.eta)

    @classmethod
    def at_scale(cls, E: float, n: int, eps_lr: float = DEFAULT_EPS_LR) -> "ComplexPoint":
        return cls(E, default_eta(n, eps_lr))


def default_eta(n: int, eps_lr: float = DEFAULT_EPS_LR) -> float:
    """Working scale ``n^(-2/3 - 2 eps_lr)``."""
    return float(n) ** (-2.0 / 3.0 - 2.0 * eps_lr)


def _as_z(z) -> complex:
    if isinstance(z, ComplexPoint):
        return z.z
    z = complex(z)
    if not z.imag > 0.0:
        raise DomainError(f"spectral parameter must have positive imaginary part, got {z}")
    return z


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in non-increasing order with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=np.float64)
        vec = np.asarray(self.eigenvectors, dtype=np.float64)
        if lam.ndim != 1 or vec.shape != (lam.size, lam.size):
            raise DataError(f"inconsistent spectrum shapes {lam.shape}, {vec.shape}")
        if np.any(np.diff(lam) > 0):
            raise DataError("eigenvalues must be non-increasing")
        for name, a in (("eigenvalues", lam), ("eigenvectors", vec)):
            a = np.ascontiguousarray(a)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def vector(self, alpha: int) -> np.ndarray:
        """Eigenvector of the ``alpha``-th largest eigenvalue (1-based)."""
        return self.eigenvectors[:, alpha - 1]

    def overlaps(self, x: np.ndarray) -> np.ndarray:
        """Coordinates ``<x, v_alpha>`` in the eigenbasis."""
        return self.eigenvectors.T @ np.asarray(x, dtype=np.float64)

    def residuals(self, matrix) -> dict:
        """Eigen-equation, orthonormality and trace residuals against ``matrix``."""
        a = matrix.entries if isinstance(matrix, SymmetricMatrix) else np.asarray(matrix)
        v, lam = self.eigenvectors, self.eigenvalues
        eig = np.linalg.norm(a @ v - v * lam, axis=0).max()
        orth = np.abs(v.T @ v - np.eye(self.n)).max()
        tr = abs(lam.sum() - np.trace(a))
        return {
            "eigen_residual": float(eig),
            "eigen_scale": float(1.0 + np.linalg.norm(a, 2)),
            "orthonormality": float(orth),
            "trace_error": float(tr),
        }

    # columnar binary form: magic, header length, JSON header, eigenvalues, row-major vectors
    def save(self, path) -> None:
        header = json.dumps({"n": self.n, **self.meta}, sort_keys=True).encode()
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<Q", len(header)))
            fh.write(header)
            fh.write(self.eigenvalues.astype("<f8").tobytes())
            fh.write(self.eigenvectors.astype("<f8").tobytes(order="C"))

    @classmethod
    def load(cls, path) -> "Spectrum":
        raw = Path(path).read_bytes()
        if not raw.startswith(_MAGIC):
            raise DataError(f"{path}: not a spectrum file")
        pos = len(_MAGIC)
        (hlen,) = struct.unpack_from("<Q", raw, pos)
        pos += 8
        header = json.loads(raw[pos : pos + hlen])
        pos += hlen
        n = int(header.pop("n"))
        expected = pos + 8 * (n + n * n)
        if len(raw) != expected:
            raise DataError(f"{path}: truncated spectrum file ({len(raw)} of {expected} bytes)")
        lam = np.frombuffer(raw, dtype="<f8", count=n, offset=pos).astype(np.float64)
        vec = np.frombuffer(raw, dtype="<f8", count=n * n, offset=pos + 8 * n).reshape(n, n)
        return cls(lam, vec.astype(np.float64), header)


def matrix_digest(a: np.ndarray) -> str:
    return hashlib.blake2b(np.ascontiguousarray(a, dtype=np.float64).tobytes(), digest_size=16).hexdigest()


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry is positive (ties: lowest index)."""
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * np.where(pivots < 0, -1.0, 1.0)


def eigendecompose(S, meta: dict | None = None) -> Spectrum:
    a = S.entries if isinstance(S, SymmetricMatrix) else np.asarray(S, dtype=np.float64)
    if a.shape[0] > MAX_DENSE_N:
        raise DataError(f"dense eigensolver capped at n={MAX_DENSE_N}, got {a.shape[0]}")
    try:
        lam, vec = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed for matrix {matrix_digest(a)}: {exc}") from exc
    lam = lam[::-1].copy()
    vec = fix_signs(vec[:, ::-1])
    return Spectrum(lam, vec, dict(meta or {}))


def green_quadratic_form(spec: Spectrum, x: np.ndarray, y: np.ndarray, z) -> complex:
    """``<x, (A - z)^{-1} y>`` as a spectral sum."""
    z = _as_z(z)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != (spec.n,) or y.shape != (spec.n,):
        raise DataError(f"vectors must have length {spec.n}")
    return complex(np.sum(spec.overlaps(x) * spec.overlaps(y) / (spec.eigenvalues - z)))


def green_quadratic_form_direct(matrix, x: np.ndarray, y: np.ndarray, z) -> complex:
    """Same quantity by a complex linear solve; used as a cross-check."""
    z = _as_z(z)
    a = matrix.entries if isinstance(matrix, SymmetricMatrix) else np.asarray(matrix)
    sol = np.linalg.solve(a - z * np.eye(a.shape[0]), np.asarray(y, dtype=np.complex128))
    return complex(np.dot(np.asarray(x, dtype=np.float64), sol))


def green_matrix(spec: Spectrum, z) -> np.ndarray:
    z = _as_z(z)
    v = spec.eigenvectors
    return (v / (spec.eigenvalues - z)) @ v.T


def stieltjes(spec: Spectrum, z) -> complex:
    """Empirical Stieltjes transform ``(1/n) sum 1/(lambda - z)``."""
    z = _as_z(z)
    return complex(np.mean(1.0 / (spec.eigenvalues - z)))


def semicircle_density(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * math.pi)
    return out if out.ndim else float(out)


def semicircle_tail(x):
    """Mass of the semicircle law on ``[x, 2]``, in closed form."""
    x = np.clip(np.asarray(x, dtype=np.float64), -2.0, 2.0)
    val = (math.pi - 0.5 * x * np.sqrt(4.0 - x * x) - 2.0 * np.arcsin(0.5 * x)) / (2.0 * math.pi)
    return val if val.ndim else float(val)


def semicircle_cdf(x):
    t = 1.0 - np.asarray(semicircle_tail(x))
    return t if t.ndim else float(t)


def semicircle_stieltjes(z) -> complex:
    """Semicircle Stieltjes transform on the upper half plane.

    Written as ``-2 / (z + sqrt(z-2) sqrt(z+2))`` with principal roots, which
    selects the branch with ``Im m > 0`` and avoids cancellation for large z.
    """
    z = _as_z(z)
    s = np.sqrt(complex(z - 2.0)) * np.sqrt(complex(z + 2.0))
    return complex(-2.0 / (z + s))


def classical_locations(n: int) -> np.ndarray:
    """Quantiles ``gamma_i`` with semicircle mass ``i/n`` on ``[gamma_i, 2]``."""
    if int(n) != n or n < 2:
        raise DataError(f"n must be an integer >= 2, got {n}")
    target = np.arange(1, n + 1) / n
    lo = np.full(n, -2.0)
    hi = np.full(n, 2.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        moving = (mid > lo) & (mid < hi)
        if not moving.any():
            break
        tail = semicircle_tail(mid)
        above = tail > target
        exact = moving & (tail == target)
        lo = np.where((above & moving) | exact, mid, lo)
        hi = np.where((~above & moving) | exact, mid, hi)
    gamma = 0.5 * (lo + hi)
    gamma[-1] = -2.0
    return gamma
