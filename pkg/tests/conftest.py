import math

import numpy as np
import pytest

from alphaherd.kernel import Dataset, KernelSpec, build_context, median_bandwidth


def brute_gauss(x, y, sigma):
    """Pure-python gaussian kernel, independent of the vectorized path."""
    return math.exp(-sum((a - b) ** 2 for a, b in zip(x, y)) / sigma**2)


def brute_alpha_mmd(points, idx, alpha, sigma):
    """Term-by-term alpha-MMD^2 straight from the double sums."""
    n, m = len(points), len(idx)
    full = sum(brute_gauss(p, q, sigma) for p in points for q in points) / n**2
    sel = sum(brute_gauss(points[i], points[j], sigma) for i in idx for j in idx) / m**2
    cross = sum(brute_gauss(p, points[j], sigma) for p in points for j in idx) / (m * n)
    return alpha**2 * full + sel - 2 * alpha * cross


def random_instance(rng, n_lo=2, n_hi=100, d_hi=4, cache_gram=False):
    n = int(rng.integers(n_lo, n_hi + 1))
    d = int(rng.integers(1, d_hi + 1))
    data = Dataset(rng.normal(size=(n, d)) * rng.uniform(0.2, 5.0))
    spec = KernelSpec.gaussian(median_bandwidth(data))
    return build_context(data, spec, cache_gram=cache_gram)


@pytest.fixture
def line3():
    """Points {0, 1, 2} on the real line, gaussian kernel with sigma = 1."""
    return build_context(Dataset(np.array([[0.0], [1.0], [2.0]])), KernelSpec.gaussian(1.0))


@pytest.fixture
def line2():
    return build_context(Dataset(np.array([[0.0], [1.0]])), KernelSpec.gaussian(1.0))


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def criterion_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
