import numpy as np
import pytest

from liftguard import product, validate

J1 = [[0.25, 0.10, 0.05], [0.15, 0.20, 0.25]]

ACCEPTANCE_LINES = []


@pytest.fixture
def j1():
    return validate(J1)


@pytest.fixture
def prod():
    return product([0.3, 0.7], [0.2, 0.5, 0.3])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_joint(rng, n_s, n_x, zero_frac=0.0):
    """Uniform-cell random joint; optional zero cells while keeping marginals positive."""
    while True:
        p = rng.random((n_s, n_x))
        if zero_frac:
            p[rng.random((n_s, n_x)) < zero_frac] = 0.0
        if p.sum(axis=1).min() > 0 and p.sum(axis=0).min() > 0:
            return validate(p / p.sum())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
