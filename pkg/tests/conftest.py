import numpy as np
import pytest

from netscale.graph import SimpleGraph, parse_edge_list, simplify


def graph_from_text(text: str) -> SimpleGraph:
    return simplify(parse_edge_list(text))


def graph_from_edges(n, edges) -> SimpleGraph:
    u = [a for a, _ in edges]
    v = [b for _, b in edges]
    return SimpleGraph.from_edges(n, u, v)


def random_small_graph(rng: np.random.Generator, max_n: int = 12) -> SimpleGraph:
    n = int(rng.integers(1, max_n + 1))
    total = n * (n - 1) // 2
    m = int(rng.integers(0, total + 1))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    picks = rng.choice(total, size=m, replace=False) if total else []
    return graph_from_edges(n, [pairs[i] for i in picks])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
