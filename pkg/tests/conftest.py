import numpy as np
import pytest

from kfptools.polynomial import Polynomial


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_polynomial(rng, d, degree, terms=6):
    out = {}
    for _ in range(terms):
        k = int(rng.integers(0, degree + 1))
        alpha = np.zeros(d, dtype=int)
        for i in rng.integers(0, d, size=k):
            alpha[i] += 1
        out[tuple(alpha)] = float(rng.integers(-5, 6)) or 1.0
    return Polynomial(d, out)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
