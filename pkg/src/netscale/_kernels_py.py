"""Pure-Python kernel fallback.

Mirrors the compiled ``_kernels`` API on top of numpy/scipy. Correct on all
inputs and bit-identical to the compiled backend given the same arguments,
just slower on the swap and per-pair BFS paths.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse import csgraph

# rows per scipy BFS block, sized to keep the dense distance block small
_BLOCK_CELLS = 4_000_000


def _as_csr(indptr: np.ndarray, indices: np.ndarray) -> csr_matrix:
    n = len(indptr) - 1
    data = np.ones(len(indices), dtype=np.int8)
    return csr_matrix((data, indices, indptr), shape=(n, n))


def connected_components(indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    n = len(indptr) - 1
    if n == 0:
        return np.empty(0, dtype=np.int64)
    _, labels = csgraph.connected_components(_as_csr(indptr, indices), directed=False)
    return labels.astype(np.int64)


def geodesic_sum(indptr: np.ndarray, indices: np.ndarray) -> tuple[int, int]:
    """Sum and count of hop distances over ordered reachable pairs s != t."""
    n = len(indptr) - 1
    if n == 0:
        return 0, 0
    g = _as_csr(indptr, indices)
    block = max(1, _BLOCK_CELLS // n)
    total = 0.0
    pairs = 0
    for start in range(0, n, block):
        rows = np.arange(start, min(start + block, n))
        d = csgraph.dijkstra(g, directed=False, unweighted=True, indices=rows)
        finite = np.isfinite(d)
        total += d[finite].sum()
        pairs += int(finite.sum()) - len(rows)  # drop the d(i,i)=0 self entries
    return int(round(total)), pairs


def pair_distances(
    indptr: np.ndarray,
    indices: np.ndarray,
    src: np.ndarray,
    dst: np.ndarray,
) -> np.ndarray:
    n = len(indptr) - 1
    out = np.empty(len(src), dtype=np.int64)
    if len(src) == 0:
        return out
    g = _as_csr(indptr, indices)
    sources, inverse = np.unique(src, return_inverse=True)
    block = max(1, _BLOCK_CELLS // max(n, 1))
    for start in range(0, len(sources), block):
        rows = sources[start : start + block]
        d = csgraph.dijkstra(g, directed=False, unweighted=True, indices=rows)
        in_block = (inverse >= start) & (inverse < start + len(rows))
        vals = d[inverse[in_block] - start, dst[in_block]]
        vals = np.where(np.isfinite(vals), vals, -1.0)
        out[in_block] = vals.astype(np.int64)
    return out


def triangle_count(indptr: np.ndarray, indices: np.ndarray) -> int:
    n = len(indptr) - 1
    if n == 0 or len(indices) == 0:
        return 0
    a = csr_matrix((np.ones(len(indices), dtype=np.int64), indices, indptr), shape=(n, n))
    # (A @ A) ∘ A sums common-neighbor counts over ordered adjacent pairs: 6 per triangle
    paths = (a @ a).multiply(a)
    return int(paths.sum()) // 6


def double_edge_swap_chunk(
    eu: np.ndarray,
    ev: np.ndarray,
    n: int,
    pick1: np.ndarray,
    pick2: np.ndarray,
    orient: np.ndarray,
) -> int:
    """Same semantics as the compiled version; mutates eu/ev in place."""
    us = eu.tolist()
    vs = ev.tolist()
    present = {u * n + v for u, v in zip(us, vs)}
    accepted = 0
    for e1, e2, flip in zip(pick1.tolist(), pick2.tolist(), orient.tolist()):
        if e1 == e2:
            continue
        a, b = us[e1], vs[e1]
        c, d = us[e2], vs[e2]
        if flip:
            c, d = d, c
        if a == d or c == b:
            continue
        k1 = a * n + d if a < d else d * n + a
        k2 = c * n + b if c < b else b * n + c
        if k1 == k2 or k1 in present or k2 in present:
            continue
        present.discard(a * n + b if a < b else b * n + a)
        present.discard(c * n + d if c < d else d * n + c)
        present.add(k1)
        present.add(k2)
        us[e1], vs[e1] = (a, d) if a < d else (d, a)
        us[e2], vs[e2] = (c, b) if c < b else (b, c)
        accepted += 1
    eu[:] = us
    ev[:] = vs
    return accepted
