import numpy as np
import pytest

from nodal_lab.ensembles import AdjacencyMatrix, EnsembleConfig, SymmetricMatrix, sample_gnp
from nodal_lab.errors import DataError
from nodal_lab.io import load_config, read_matrix_market, save_config, write_matrix_market

from conftest import random_symmetric


def test_adjacency_round_trip(tmp_path):
    A = sample_gnp(40, 0.3, 7)
    path = tmp_path / "g.mtx"
    write_matrix_market(path, A, comment="gnp 40")
    B = read_matrix_market(path)
    assert isinstance(B, AdjacencyMatrix)
    assert np.array_equal(A.entries, B.entries)
    assert "pattern" in path.read_text().splitlines()[0]


def test_symmetric_round_trip_is_bit_exact(tmp_path, rng):
    H = random_symmetric(25, rng)
    path = tmp_path / "h.mtx"
    write_matrix_market(path, H)
    K = read_matrix_market(path)
    assert isinstance(K, SymmetricMatrix)
    assert np.array_equal(H.entries, K.entries)


def test_empty_graph_round_trip(tmp_path):
    A = AdjacencyMatrix(np.zeros((5, 5), dtype=np.uint8))
    write_matrix_market(tmp_path / "e.mtx", A)
    assert read_matrix_market(tmp_path / "e.mtx").entries.sum() == 0


def test_missing_and_garbage_files(tmp_path):
    with pytest.raises(DataError):
        read_matrix_market(tmp_path / "nope.mtx")
    bad = tmp_path / "bad.mtx"
    bad.write_text("not a matrix\n")
    with pytest.raises(DataError):
        read_matrix_market(bad)
    with pytest.raises(DataError):
        load_config(tmp_path / "nope.json")


def test_unwritable_target(tmp_path):
    with pytest.raises(DataError):
        write_matrix_market(tmp_path / "missing" / "dir" / "a.mtx", sample_gnp(5, 0.5, 0))


def test_config_round_trip(tmp_path):
    cfg = EnsembleConfig(n=30, p=0.2, seed=99, ensemble="goe")
    save_config(tmp_path / "c.json", cfg)
    assert load_config(tmp_path / "c.json") == cfg
