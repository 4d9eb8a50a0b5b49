import numpy as np
import pytest

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_simplex_columns(rng, k, n):
    """K x N matrix with Dirichlet(1) columns."""
    return rng.dirichlet(np.ones(k), size=n).T


def random_instance(rng, n_max=20, k_max=3, p_max=3):
    n = int(rng.integers(3, n_max + 1))
    k = int(rng.integers(2, min(k_max, n) + 1))
    p = int(rng.integers(1, p_max + 1))
    views = [rng.standard_normal((n, int(rng.integers(1, 5)))) for _ in range(p)]
    centroids = [X[rng.choice(n, size=k, replace=False)] + 0.1 * rng.standard_normal((k, X.shape[1])) for X in views]
    alpha = rng.dirichlet(np.ones(p))
    return views, centroids, alpha, k
