"""Backend parity: the compiled kernels and the numpy/scipy fallback must
produce identical results for identical inputs."""

import numpy as np
import pytest

from netscale import _kernels_py as kpy
from netscale import nullmodels as nm
from netscale.graph import parse_edge_list, simplify

kc = pytest.importorskip("netscale._kernels", reason="compiled kernels not built")


def _graphs():
    yield nm.gen_gnm(300, 900, seed=1)
    yield nm.gen_gnm(64, 100, seed=2)   # exactly one bit-parallel batch
    yield nm.gen_gnm(65, 80, seed=3)    # batch plus a 1-source remainder
    yield nm.gen_gnm(200, 0, seed=4)
    yield nm.gen_gnm(10, 45, seed=5)    # complete graph
    yield simplify(parse_edge_list("a b\nb c\nx y\nz z\n"))


@pytest.mark.parametrize("g", list(_graphs()), ids=lambda g: f"n{g.n}m{g.m}")
def test_components_partition_equal(g):
    a = kc.connected_components(g.indptr, g.indices)
    b = kpy.connected_components(g.indptr, g.indices)
    # labels may differ; the partitions must not
    mapping = {}
    for x, y in zip(a.tolist(), b.tolist()):
        assert mapping.setdefault(x, y) == y
    assert len(set(mapping.values())) == len(mapping)


@pytest.mark.parametrize("g", list(_graphs()), ids=lambda g: f"n{g.n}m{g.m}")
def test_geodesic_sum_equal(g):
    assert kc.geodesic_sum(g.indptr, g.indices) == kpy.geodesic_sum(g.indptr, g.indices)


@pytest.mark.parametrize("g", list(_graphs()), ids=lambda g: f"n{g.n}m{g.m}")
def test_triangle_count_equal(g):
    assert kc.triangle_count(g.indptr, g.indices) == kpy.triangle_count(g.indptr, g.indices)


def test_pair_distances_equal(rng):
    g = nm.gen_gnm(400, 1000, seed=7)
    src = rng.integers(0, g.n, 300)
    dst = rng.integers(0, g.n, 300)
    a = kc.pair_distances(g.indptr, g.indices, src, dst)
    b = kpy.pair_distances(g.indptr, g.indices, src, dst)
    assert np.array_equal(a, b)


def test_pair_distances_unreachable_marked(rng):
    g = simplify(parse_edge_list("a b\nc d\n"))
    src = np.array([0, 0], dtype=np.int64)
    dst = np.array([1, 2], dtype=np.int64)
    for impl in (kc, kpy):
        out = impl.pair_distances(g.indptr, g.indices, src, dst)
        assert list(out) == [1, -1]


def test_swap_chunk_identical_streams(rng):
    g = nm.gen_gnm(150, 500, seed=9)
    u1, v1 = g.edge_arrays()
    u2, v2 = u1.copy(), v1.copy()
    m = len(u1)
    pick1 = rng.integers(0, m, 20000)
    pick2 = rng.integers(0, m, 20000)
    orient = rng.integers(0, 2, 20000, dtype=np.int8)
    acc_c = kc.double_edge_swap_chunk(u1, v1, g.n, pick1, pick2, orient)
    acc_p = kpy.double_edge_swap_chunk(u2, v2, g.n, pick1, pick2, orient)
    assert acc_c == acc_p > 0
    assert np.array_equal(u1, u2) and np.array_equal(v1, v2)
