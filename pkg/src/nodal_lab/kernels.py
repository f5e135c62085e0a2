"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy
fallback.  Setting ``NODAL_LAB_BACKEND=python`` forces the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("NODAL_LAB_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels


def _f64(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def label_sign_components(adj, signs) -> np.ndarray:
    """Same-sign component labels in order of smallest vertex; -1 on zeros."""
    return _impl.label_sign_components(
        np.ascontiguousarray(adj, dtype=np.uint8), np.ascontiguousarray(signs, dtype=np.int8)
    )


def secular_roots(nu, z2, c: float):
    """Roots of ``1/c + sum z2/(nu - mu)`` as (origin index, offset) pairs."""
    return _impl.secular_roots(_f64(nu), _f64(z2), float(c))


def green_entries(mu, a1, a2, E: float):
    return _impl.green_entries(_f64(mu), _f64(a1), _f64(a2), float(E))


def detection_branch(mu, a1, a2, d11, d12, d22, E, upper) -> float:
    return _impl.detection_branch(_f64(mu), _f64(a1), _f64(a2), d11, d12, d22, float(E), int(upper))


def detection_branch_root(mu, a1, a2, d11, d12, d22, lo, hi, upper, probes=8) -> float:
    return _impl.detection_branch_root(
        _f64(mu), _f64(a1), _f64(a2), float(d11), float(d12), float(d22),
        float(lo), float(hi), int(upper), int(probes),
    )


def backend(name: str):
    """Module implementing the named backend (``"cython"`` or ``"python"``)."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
