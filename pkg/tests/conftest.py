import numpy as np
import pytest

from nodal_lab.ensembles import SymmetricMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_symmetric(n: int, rng, scale: float | None = None) -> SymmetricMatrix:
    a = rng.standard_normal((n, n))
    a = (a + a.T) / np.sqrt(2 * n if scale is None else scale)
    return SymmetricMatrix(a)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
