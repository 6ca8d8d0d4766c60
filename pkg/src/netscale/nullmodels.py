"""Random-graph null models.

Three exact-count models (G(n,m), configuration model via double-edge swaps,
microcanonical DC-SBM with a swap-based repair heuristic) and three
expected-count variants (G(n,p), Chung-Lu, maximum-entropy DC-SBM). Every
sampler is a pure function of its parameters and seed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .graph import SimpleGraph

logger = logging.getLogger(__name__)

SWAP_CHUNK = 1 << 20


@dataclass
class BlockModelParams:
    """DC-SBM parameters: degrees k, block labels b, block edge counts e.

    ``edge_counts`` uses the stub convention: the diagonal entry e_rr counts
    each within-block edge twice, so each row sums to the block's stub count.
    ``theta``/``omega`` are only present for the maximum-entropy variant.
    """

    degrees: np.ndarray
    blocks: np.ndarray
    edge_counts: np.ndarray
    theta: np.ndarray | None = None
    omega: np.ndarray | None = None
    description_length: float | None = None

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def n_blocks(self) -> int:
        return self.edge_counts.shape[0]

    def block_stub_counts(self) -> np.ndarray:
        return self.edge_counts.sum(axis=1)

    def validate(self) -> None:
        k = np.asarray(self.degrees)
        b = np.asarray(self.blocks)
        e = np.asarray(self.edge_counts)
        if len(k) != len(b):
            raise ValueError("degree and block arrays differ in length")
        if np.any(k < 0):
            raise ValueError("negative degree")
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("edge_counts must be square")
        if np.any(e < 0):
            raise ValueError("negative block edge count")
        if not np.array_equal(e, e.T):
            raise ValueError("edge_counts must be symmetric")
        if len(b) and (b.min() < 0 or b.max() >= e.shape[0]):
            raise ValueError("block label out of range")
        if np.any(np.diag(e) % 2 != 0):
            raise ValueError("diagonal block counts must be even (stub convention)")
        stub_by_block = np.bincount(b, weights=k, minlength=e.shape[0]).astype(np.int64)
        if not np.array_equal(stub_by_block, self.block_stub_counts()):
            raise ValueError("block stub counts do not match degree sums")
        if self.theta is not None:
            if np.any(np.asarray(self.theta) < 0):
                raise ValueError("negative theta")
            sums = np.bincount(b, weights=self.theta, minlength=e.shape[0])
            occupied = np.bincount(b, minlength=e.shape[0]) > 0
            if not np.allclose(sums[occupied], 1.0):
                raise ValueError("theta must sum to 1 within each occupied block")
        if self.omega is not None and np.any(np.asarray(self.omega) < 0):
            raise ValueError("negative omega")

    def to_json_dict(self) -> dict:
        return {
            "k": np.asarray(self.degrees).tolist(),
            "b": np.asarray(self.blocks).tolist(),
            "e": np.asarray(self.edge_counts).tolist(),
            "theta": None if self.theta is None else np.asarray(self.theta).tolist(),
            "omega": None if self.omega is None else np.asarray(self.omega).tolist(),
            "description_length": self.description_length,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "BlockModelParams":
        return cls(
            degrees=np.asarray(data["k"], dtype=np.int64),
            blocks=np.asarray(data["b"], dtype=np.int64),
            edge_counts=np.asarray(data["e"], dtype=np.int64),
            theta=None if data.get("theta") is None else np.asarray(data["theta"], dtype=np.float64),
            omega=None if data.get("omega") is None else np.asarray(data["omega"], dtype=np.float64),
            description_length=data.get("description_length"),
        )


@dataclass(frozen=True)
class Multigraph:
    """Raw stub-matching output; may contain self-loops and multi-edges."""

    n: int
    edges: np.ndarray  # (M, 2) int64


def params_from_graph(g: SimpleGraph, blocks: np.ndarray) -> BlockModelParams:
    """Microcanonical DC-SBM parameters read off a graph and a partition."""
    blocks = np.asarray(blocks, dtype=np.int64)
    if len(blocks) != g.n:
        raise ValueError("block label array must cover all nodes")
    n_blocks = int(blocks.max()) + 1 if len(blocks) else 0
    e = np.zeros((n_blocks, n_blocks), dtype=np.int64)
    u, v = g.edge_arrays()
    np.add.at(e, (blocks[u], blocks[v]), 1)
    np.add.at(e, (blocks[v], blocks[u]), 1)  # diagonal picks up 2 per within-block edge
    return BlockModelParams(degrees=g.degrees().astype(np.int64), blocks=blocks, edge_counts=e)


def as_maxent(params: BlockModelParams) -> BlockModelParams:
    """Derive theta_i = k_i / e_{b_i} and omega_rs = e_rs so expected degrees
    and block counts match the microcanonical parameters."""
    stubs = params.block_stub_counts().astype(np.float64)
    theta = np.zeros(params.n, dtype=np.float64)
    nonzero = stubs[params.blocks] > 0
    theta[nonzero] = params.degrees[nonzero] / stubs[params.blocks[nonzero]]
    return replace(params, theta=theta, omega=params.edge_counts.astype(np.float64))


def maxent_params_from_graph(g: SimpleGraph, blocks: np.ndarray) -> BlockModelParams:
    """Fit the maximum-entropy DC-SBM to a graph and a partition."""
    return as_maxent(params_from_graph(g, blocks))


def _unrank_pairs(n: int, ranks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map lexicographic pair ranks to (i, j) with i < j."""
    starts = np.zeros(n, dtype=np.int64)
    np.cumsum(np.arange(n - 1, 0, -1, dtype=np.int64), out=starts[1:])
    i = np.searchsorted(starts, ranks, side="right") - 1
    j = ranks - starts[i] + i + 1
    return i, j


def _sample_distinct_ranks(total: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random subset of ``count`` ranks out of ``total``.

    Rejection sampling: repeated values are skipped and the first ``count``
    distinct values drawn are kept, which leaves the resulting set uniform.
    The complement is sampled instead when ``count`` exceeds half the space.
    """
    if count > total:
        raise ValueError("cannot sample more pairs than exist")
    invert = count > total // 2
    want = total - count if invert else count
    chosen = np.empty(0, dtype=np.int64)
    while len(chosen) < want:
        need = want - len(chosen)
        draw = rng.integers(0, total, size=need + need // 4 + 16)
        _, first_pos = np.unique(draw, return_index=True)
        fresh = draw[np.sort(first_pos)]  # distinct values in draw order
        if len(chosen):
            fresh = fresh[~np.isin(fresh, chosen)]
        chosen = np.concatenate([chosen, fresh[:need]])
    if invert:
        mask = np.ones(total, dtype=bool)
        mask[chosen] = False
        chosen = np.flatnonzero(mask).astype(np.int64)
    return chosen


def gen_gnm(n: int, m: int, seed: int | None = None) -> SimpleGraph:
    """Uniform simple graph with exactly n nodes and m edges."""
    total = n * (n - 1) // 2
    if m < 0 or m > total:
        raise ValueError(f"m={m} outside [0, {total}]")
    rng = np.random.default_rng(seed)
    ranks = _sample_distinct_ranks(total, m, rng)
    u, v = _unrank_pairs(n, ranks)
    return SimpleGraph.from_edges(n, u, v)


def gen_gnp(n: int, p: float, seed: int | None = None) -> SimpleGraph:
    """Each pair included independently with probability p.

    Sampled as a binomial edge count followed by a uniform edge set, which
    is distributionally identical and avoids touching all O(n^2) pairs.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    total = n * (n - 1) // 2
    rng = np.random.default_rng(seed)
    m = int(rng.binomial(total, p)) if total else 0
    ranks = _sample_distinct_ranks(total, m, rng)
    u, v = _unrank_pairs(n, ranks)
    return SimpleGraph.from_edges(n, u, v)


def config_model_sample(
    g: SimpleGraph, swaps_per_edge: int = 20, seed: int | None = None
) -> SimpleGraph:
    """Degree-preserving randomization by MCMC double-edge swaps.

    Starts from the input graph and runs ``swaps_per_edge * m`` attempted
    swaps; attempts creating self-loops or multi-edges are rejected, which
    keeps the chain on simple graphs and the degree sequence fixed.
    """
    if swaps_per_edge < 1:
        raise ValueError("swaps_per_edge must be at least 1")
    u, v = g.edge_arrays()
    m = len(u)
    if m < 2:
        return SimpleGraph.from_edges(g.n, u, v)
    rng = np.random.default_rng(seed)
    remaining = swaps_per_edge * m
    while remaining > 0:
        chunk = min(remaining, SWAP_CHUNK)
        pick1 = rng.integers(0, m, size=chunk)
        pick2 = rng.integers(0, m, size=chunk)
        orient = rng.integers(0, 2, size=chunk, dtype=np.int8)
        kernels.double_edge_swap_chunk(u, v, g.n, pick1, pick2, orient)
        remaining -= chunk
    return SimpleGraph.from_edges(g.n, u, v)


def _skip_sample_sorted(
    nodes_u: np.ndarray,
    w_u: np.ndarray,
    nodes_v: np.ndarray,
    w_v: np.ndarray,
    scale: float,
    within: bool,
    rng: np.random.Generator,
    edges: list[tuple[int, int]],
) -> int:
    """Geometric-skip sampler over pairs with p = min(1, scale*w_u*w_v).

    Weights must be sorted in non-increasing order. ``within=True`` samples
    unordered pairs inside one node set (nodes_v is ignored); otherwise all
    cross pairs between the two sets. Returns the number of capped pairs.
    """
    capped = 0
    n_u = len(nodes_u)
    n_v = n_u if within else len(nodes_v)
    for i in range(n_u if not within else n_u - 1):
        wu = scale * w_u[i]
        if wu <= 0.0:
            break
        vi = i + 1 if within else 0
        if vi >= n_v:
            break
        p = min(wu * (w_u[vi] if within else w_v[vi]), 1.0)
        while vi < n_v and p > 0.0:
            if p < 1.0:
                vi += int(math.log(rng.random()) / math.log1p(-p))
            if vi < n_v:
                raw = wu * (w_u[vi] if within else w_v[vi])
                if raw > 1.0:
                    capped += 1
                q = min(raw, 1.0)
                if rng.random() < q / p:
                    a = int(nodes_u[i])
                    b = int(nodes_u[vi] if within else nodes_v[vi])
                    edges.append((a, b))
                p = q
                vi += 1
    return capped


def chung_lu_sample(k: np.ndarray, seed: int | None = None) -> SimpleGraph:
    """Independent pairs with p_ij = min(1, k_i*k_j / sum(k))."""
    k = np.asarray(k, dtype=np.float64)
    if np.any(k < 0):
        raise ValueError("negative expected degree")
    n = len(k)
    total = k.sum()
    if total == 0:
        return SimpleGraph.from_edges(n, [], [])
    order = np.argsort(-k, kind="stable")
    w = k[order]
    rng = np.random.default_rng(seed)
    edges: list[tuple[int, int]] = []
    capped = _skip_sample_sorted(order, w, order, w, 1.0 / total, True, rng, edges)
    if capped:
        logger.warning("chung_lu_sample capped %d pair probabilities at 1", capped)
    u = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
    v = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
    return SimpleGraph.from_edges(n, u, v)


def dcsbm_generate(params: BlockModelParams, seed: int | None = None) -> tuple[Multigraph, int]:
    """Microcanonical stub matching: exact degrees and block edge counts.

    Returns the (possibly non-simple) multigraph and the number of edge
    instances that violate simplicity (self-loops plus duplicate copies).
    """
    params.validate()
    rng = np.random.default_rng(seed)
    n_blocks = params.n_blocks
    e = params.edge_counts
    pools = []
    for r in range(n_blocks):
        members = np.flatnonzero(params.blocks == r)
        stubs = np.repeat(members, params.degrees[members])
        pools.append(rng.permutation(stubs))
    cursor = [0] * n_blocks
    chunks = []
    for r in range(n_blocks):
        take = int(e[r, r])
        seg = pools[r][cursor[r] : cursor[r] + take]
        cursor[r] += take
        chunks.append(seg.reshape(-1, 2))
        for s in range(r + 1, n_blocks):
            take = int(e[r, s])
            a = pools[r][cursor[r] : cursor[r] + take]
            cursor[r] += take
            b = pools[s][cursor[s] : cursor[s] + take]
            cursor[s] += take
            chunks.append(np.stack([a, b], axis=1))
    edges = np.concatenate(chunks, axis=0) if chunks else np.empty((0, 2), dtype=np.int64)
    edges = edges.astype(np.int64)
    loops = int(np.count_nonzero(edges[:, 0] == edges[:, 1]))
    plain = edges[edges[:, 0] != edges[:, 1]]
    lo = np.minimum(plain[:, 0], plain[:, 1])
    hi = np.maximum(plain[:, 0], plain[:, 1])
    if len(lo):
        _, counts = np.unique(lo * params.n + hi, return_counts=True)
        dups = int((counts - 1).sum())
    else:
        dups = 0
    return Multigraph(n=params.n, edges=edges), loops + dups


class _RepairState:
    """Mutable edge multiset with per-block half-edge indexing.

    Supports O(1) uniform sampling of ordered half-edges (c, d) with c in a
    given block, which is what the repair heuristic draws its swap
    candidates from.
    """

    def __init__(self, edges: np.ndarray, blocks: np.ndarray, n_blocks: int):
        self.us = edges[:, 0].tolist()
        self.vs = edges[:, 1].tolist()
        self.blocks = blocks
        self.alive = [True] * len(self.us)
        self.pair_count: dict[tuple[int, int], int] = {}
        self.half: list[list[tuple[int, int]]] = [[] for _ in range(n_blocks)]
        self.hpos: dict[tuple[int, int], int] = {}
        for idx in range(len(self.us)):
            self.pair_count[self._norm(idx)] = self.pair_count.get(self._norm(idx), 0) + 1
            self._half_add(idx)

    def _norm(self, idx: int) -> tuple[int, int]:
        a, b = self.us[idx], self.vs[idx]
        return (a, b) if a <= b else (b, a)

    def _half_add(self, idx: int) -> None:
        for slot, node in ((0, self.us[idx]), (1, self.vs[idx])):
            lst = self.half[self.blocks[node]]
            self.hpos[(idx, slot)] = len(lst)
            lst.append((idx, slot))

    def _half_remove(self, idx: int, endpoints: tuple[int, int]) -> None:
        for slot, node in ((0, endpoints[0]), (1, endpoints[1])):
            lst = self.half[self.blocks[node]]
            pos = self.hpos.pop((idx, slot))
            last = lst.pop()
            if pos < len(lst):  # removed entry was not the tail; move tail into its slot
                lst[pos] = last
                self.hpos[last] = pos

    def set_edge(self, idx: int, a: int, b: int) -> None:
        old = (self.us[idx], self.vs[idx])
        self._half_remove(idx, old)
        key = self._norm(idx)
        self.pair_count[key] -= 1
        if self.pair_count[key] == 0:
            del self.pair_count[key]
        self.us[idx], self.vs[idx] = (a, b) if a <= b else (b, a)
        self.pair_count[self._norm(idx)] = self.pair_count.get(self._norm(idx), 0) + 1
        self._half_add(idx)

    def delete_edge(self, idx: int) -> None:
        self._half_remove(idx, (self.us[idx], self.vs[idx]))
        key = self._norm(idx)
        self.pair_count[key] -= 1
        if self.pair_count[key] == 0:
            del self.pair_count[key]
        self.alive[idx] = False

    def count(self, a: int, b: int) -> int:
        key = (a, b) if a <= b else (b, a)
        return self.pair_count.get(key, 0)

    def degrees(self, n: int) -> np.ndarray:
        deg = np.zeros(n, dtype=np.int64)
        for idx in range(len(self.us)):
            if self.alive[idx]:
                deg[self.us[idx]] += 1
                deg[self.vs[idx]] += 1
        return deg

    def block_edge_counts(self, n_blocks: int) -> np.ndarray:
        e = np.zeros((n_blocks, n_blocks), dtype=np.int64)
        for idx in range(len(self.us)):
            if self.alive[idx]:
                r, s = self.blocks[self.us[idx]], self.blocks[self.vs[idx]]
                e[r, s] += 1
                e[s, r] += 1
        return e


def dcsbm_repair(
    mg: Multigraph,
    params: BlockModelParams,
    max_attempts: int = 100,
    seed: int | None = None,
    validate: bool = False,
) -> tuple[SimpleGraph, int]:
    """Resolve self-loops and multi-edges by same-block double-edge swaps.

    For each offending edge (a, b), draws candidate edges (c, d) with c in
    a's block and swaps to (a, d), (c, b) unless that would itself violate
    simplicity; after ``max_attempts`` failed draws the offending edge is
    deleted. Accepted swaps preserve degrees, labels, and block edge counts
    (re-checked per swap when ``validate`` is set).
    """
    rng = np.random.default_rng(seed)
    blocks = np.asarray(params.blocks, dtype=np.int64)
    state = _RepairState(mg.edges, blocks, params.n_blocks)
    if validate:
        deg_ref = state.degrees(mg.n)
        e_ref = state.block_edge_counts(params.n_blocks)
    deleted = 0
    worklist = [
        idx
        for idx in range(len(state.us))
        if state.us[idx] == state.vs[idx] or state.count(state.us[idx], state.vs[idx]) > 1
    ]
    for idx in worklist:
        if not state.alive[idx]:
            continue
        a, b = state.us[idx], state.vs[idx]
        if a != b and state.count(a, b) <= 1:
            continue  # resolved by an earlier swap
        block_a = blocks[a]
        candidates = state.half[block_a]
        fixed = False
        for _ in range(max_attempts):
            cand_idx, slot = candidates[rng.integers(0, len(candidates))]
            if cand_idx == idx:
                continue
            c = state.us[cand_idx] if slot == 0 else state.vs[cand_idx]
            d = state.vs[cand_idx] if slot == 0 else state.us[cand_idx]
            if a == d or c == b:
                continue
            p1 = (a, d) if a <= d else (d, a)
            p2 = (c, b) if c <= b else (b, c)
            if p1 == p2:
                continue
            removed1 = (a, b) if a <= b else (b, a)
            removed2 = (c, d) if c <= d else (d, c)
            if state.count(*p1) - (p1 == removed1) - (p1 == removed2) > 0:
                continue
            if state.count(*p2) - (p2 == removed1) - (p2 == removed2) > 0:
                continue
            state.set_edge(idx, a, d)
            state.set_edge(cand_idx, c, b)
            if validate:
                assert np.array_equal(state.degrees(mg.n), deg_ref), "swap changed degrees"
                assert np.array_equal(
                    state.block_edge_counts(params.n_blocks), e_ref
                ), "swap changed block edge counts"
            fixed = True
            break
        if not fixed:
            state.delete_edge(idx)
            deleted += 1
    us = [u for u, ok in zip(state.us, state.alive) if ok]
    vs = [v for v, ok in zip(state.vs, state.alive) if ok]
    return SimpleGraph.from_edges(mg.n, us, vs), deleted


def dcsbm_sample(
    params: BlockModelParams,
    max_attempts: int = 100,
    seed: int | None = None,
) -> tuple[SimpleGraph, int]:
    """Generate a microcanonical DC-SBM draw and repair it to a simple graph."""
    rng = np.random.default_rng(seed)
    mg, _ = dcsbm_generate(params, seed=int(rng.integers(0, 2**63 - 1)))
    return dcsbm_repair(mg, params, max_attempts=max_attempts, seed=int(rng.integers(0, 2**63 - 1)))


def dcsbm_maxent_sample(params: BlockModelParams, seed: int | None = None) -> SimpleGraph:
    """Independent pairs with p_ij = min(1, theta_i*theta_j*omega_{g_i g_j})."""
    if params.theta is None or params.omega is None:
        raise ValueError("max-entropy sampling requires theta and omega")
    params.validate()
    theta = np.asarray(params.theta, dtype=np.float64)
    omega = np.asarray(params.omega, dtype=np.float64)
    rng = np.random.default_rng(seed)
    n_blocks = params.n_blocks
    members = []
    weights = []
    for r in range(n_blocks):
        nodes = np.flatnonzero(params.blocks == r)
        order = np.argsort(-theta[nodes], kind="stable")
        members.append(nodes[order])
        weights.append(theta[nodes[order]])
    edges: list[tuple[int, int]] = []
    capped = 0
    for r in range(n_blocks):
        if omega[r, r] > 0:
            capped += _skip_sample_sorted(
                members[r], weights[r], members[r], weights[r], float(omega[r, r]), True, rng, edges
            )
        for s in range(r + 1, n_blocks):
            if omega[r, s] > 0:
                capped += _skip_sample_sorted(
                    members[r], weights[r], members[s], weights[s], float(omega[r, s]), False, rng, edges
                )
    if capped:
        logger.warning("dcsbm_maxent_sample capped %d pair probabilities at 1", capped)
    u = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
    v = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
    return SimpleGraph.from_edges(params.n, u, v)
