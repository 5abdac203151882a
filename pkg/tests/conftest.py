import time

import numpy as np
import pytest

_SESSION_START = time.perf_counter()
ACCEPTANCE_LINES = []


def session_elapsed():
    return time.perf_counter() - _SESSION_START


def pytest_collection_modifyitems(config, items):
    # acceptance runs last so its runtime criterion sees the whole suite
    items.sort(key=lambda item: item.module.__name__.endswith("test_acceptance"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


def random_spd(rng, p, cond=10.0):
    q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    eig = np.exp(rng.uniform(0, np.log(cond), p))
    a = (q * eig) @ q.T
    return (a + a.T) / 2


def chain3():
    return np.array([[1.25, -0.5, 0.0], [-0.5, 1.25, -0.5], [0.0, -0.5, 1.25]])


def tridiag_det(p, a=1.25, b=0.5):
    """Determinant of the constant tridiagonal matrix via D_k = a D_{k-1} - b^2 D_{k-2}."""
    d_prev, d = 1.0, a
    for _ in range(p - 1):
        d_prev, d = d, a * d - b * b * d_prev
    return d
