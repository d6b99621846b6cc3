import numpy as np
import pytest

from vrjp.graphs import Graph


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def triangle():
    return Graph(["a", "b", "c"],
                 {("a", "b"): 1.0, ("b", "c"): 2.0, ("a", "c"): 0.5})


@pytest.fixture
def path3():
    return Graph([1, 2, 3], {(1, 2): 1.0, (2, 3): 1.0})


def random_connected_weights(n, rng, extra_edges=2, lo=0.5, hi=2.0,
                             with_diag=False):
    """Random spanning tree plus extra edges; strictly positive weights."""
    w = np.zeros((n, n))
    order = rng.permutation(n)
    for k in range(1, n):
        a, b = order[k], order[rng.integers(0, k)]
        w[a, b] = w[b, a] = rng.uniform(lo, hi)
    for _ in range(extra_edges):
        a, b = rng.integers(0, n, 2)
        if a != b and w[a, b] == 0:
            w[a, b] = w[b, a] = rng.uniform(lo, hi)
    if with_diag:
        d = np.where(rng.random(n) < 0.5, rng.uniform(0.1, 1.0, n), 0.0)
        w[np.arange(n), np.arange(n)] = d
    return w


def dominant_beta(w, rng, lo=0.1, hi=2.0):
    """Beta field making 2 diag(beta) - w strictly diagonally dominant."""
    row = w.sum(axis=1) - np.diag(w)
    return 0.5 * (row + np.diag(w)) + rng.uniform(lo, hi, w.shape[0])
