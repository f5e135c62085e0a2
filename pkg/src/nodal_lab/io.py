"""Matrix Market import/export and ensemble config files."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sps

from .ensembles import AdjacencyMatrix, EnsembleConfig, SymmetricMatrix
from .errors import DataError


def write_matrix_market(path, matrix, comment: str = "") -> None:
    """Adjacency matrices go out as symmetric pattern files, others as dense symmetric reals."""
    path = Path(path)
    if not isinstance(matrix, (AdjacencyMatrix, SymmetricMatrix)):
        raise DataError(f"cannot export {type(matrix).__name__}")
    try:
        # scipy silently skips unwritable paths, so open the file here
        with open(path, "wb") as fh:
            if isinstance(matrix, AdjacencyMatrix):
                coo = sps.coo_matrix(sps.triu(sps.csr_matrix(matrix.entries), k=1))
                scipy.io.mmwrite(fh, coo.T.tocoo() + coo, comment=comment, field="pattern", symmetry="symmetric")
            else:
                scipy.io.mmwrite(fh, matrix.entries, comment=comment, field="real", symmetry="symmetric",
                                 precision=17)
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc


def read_matrix_market(path):
    """Pattern files load as ``AdjacencyMatrix``; real files as ``SymmetricMatrix``."""
    path = Path(path)
    try:
        info = scipy.io.mminfo(path)
        raw = scipy.io.mmread(path)
    except (OSError, ValueError) as exc:
        raise DataError(f"{path}: {exc}") from exc
    dense = raw.toarray() if sps.issparse(raw) else np.asarray(raw)
    if info[4] == "pattern":
        return AdjacencyMatrix((dense != 0).astype(np.uint8))
    return SymmetricMatrix(np.asarray(dense, dtype=np.float64))


def save_config(path, cfg: EnsembleConfig) -> None:
    Path(path).write_text(cfg.to_json() + "\n")


def load_config(path) -> EnsembleConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    return EnsembleConfig.from_json(text)
