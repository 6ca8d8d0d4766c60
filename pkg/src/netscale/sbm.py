"""Block-structure inference by description-length minimization.

The objective scores a partition by a degree-corrected block likelihood term
plus a parameter-count penalty:

    DL = -sum_{r,s} e_rs * ln(e_rs / (e_r * e_s))
         + B(B+1)/2 * ln(m) + n * ln(B)

where the sum runs over ordered block pairs, e_rs is in the stub convention
(diagonal counts each within-block edge twice, off-diagonal entries appear
once on each side), e_r is the block stub count, and B is the number of
occupied blocks. Lower is better. With this convention every edge carries
the same weight in the likelihood whether it sits within or between blocks.
The optimizer alternates greedy single-node moves with block merges;
repeated randomized runs plus weighted resampling give a spread of
near-optimal partitions rather than a single point estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import xlogy

from .graph import SimpleGraph
from .nullmodels import BlockModelParams, params_from_graph

_EPS = 1e-10  # strict-improvement threshold for accepting moves/merges
_LOOKAHEAD_MAX = 128  # skip the merge lookahead above this many live blocks


@dataclass(frozen=True)
class InferenceRun:
    """One optimizer run: final parameters plus its description length."""

    params: BlockModelParams
    description_length: float
    run_index: int
    seed: int


def _compact_labels(labels: np.ndarray) -> np.ndarray:
    _, dense = np.unique(labels, return_inverse=True)
    return dense.astype(np.int64)


def description_length(g: SimpleGraph, labels: np.ndarray) -> float | None:
    """Score a partition; None when the graph has no edges.

    Equals 2*sum_r e_r*ln(e_r) - sum_{r,s} e_rs*ln(e_rs) plus the penalty.
    Invariant under block-id permutation and node relabeling; B is the
    number of occupied blocks.
    """
    if g.m == 0:
        return None
    labels = _compact_labels(np.asarray(labels))
    params = params_from_graph(g, labels)
    e = params.edge_counts.astype(np.float64)
    er = e.sum(axis=1)
    b = e.shape[0]
    likelihood = float(2.0 * xlogy(er, er).sum() - xlogy(e, e).sum())
    penalty = b * (b + 1) / 2.0 * math.log(g.m) + g.n * math.log(b)
    return likelihood + penalty


class _GreedyState:
    """Working partition with incremental description-length bookkeeping."""

    def __init__(self, g: SimpleGraph, labels: np.ndarray):
        self.g = g
        self.n = g.n
        self.m = g.m
        self.max_blocks = int(labels.max()) + 1
        self.labels = labels.astype(np.int64).copy()
        self.deg = g.degrees().astype(np.int64)
        self.e = np.zeros((self.max_blocks, self.max_blocks), dtype=np.int64)
        u, v = g.edge_arrays()
        np.add.at(self.e, (self.labels[u], self.labels[v]), 1)
        np.add.at(self.e, (self.labels[v], self.labels[u]), 1)
        self.er = self.e.sum(axis=1)
        self.sizes = np.bincount(self.labels, minlength=self.max_blocks)
        self.occupied = int(np.count_nonzero(self.sizes))

    # -- description-length pieces ------------------------------------
    @staticmethod
    def _f_entry(key: tuple[int, int], value: float) -> float:
        # off-diagonal entries appear on both sides of the ordered sum
        weight = 1.0 if key[0] == key[1] else 2.0
        return weight * float(xlogy(value, value))

    @staticmethod
    def _f_block(er: float) -> float:
        return 2.0 * float(xlogy(er, er))

    def _penalty(self, occupied: int) -> float:
        return occupied * (occupied + 1) / 2.0 * math.log(self.m) + self.n * math.log(occupied)

    def dl(self) -> float:
        likelihood = float(2.0 * xlogy(self.er, self.er).sum() - xlogy(self.e, self.e).sum())
        return likelihood + self._penalty(self.occupied)

    # -- single-node moves ---------------------------------------------
    def _neighbor_block_counts(self, node: int) -> tuple[np.ndarray, np.ndarray]:
        nbr_blocks = self.labels[self.g.neighbors(node)]
        return np.unique(nbr_blocks, return_counts=True)

    def move_delta(self, node: int, dst: int, blocks: np.ndarray, counts: np.ndarray) -> float:
        """DL change if ``node`` moves from its block to ``dst``."""
        src = self.labels[node]
        k = self.deg[node]
        pairs = {(min(src, t), max(src, t)) for t in blocks}
        pairs |= {(min(dst, t), max(dst, t)) for t in blocks}
        pairs |= {(src, src), (dst, dst), (min(src, dst), max(src, dst))}
        old_pairs = sum(self._f_entry(p, self.e[p]) for p in pairs)
        old_blocks = self._f_block(self.er[src]) + self._f_block(self.er[dst])
        delta_e: dict[tuple[int, int], int] = {}

        def bump(r, s, amount):
            key = (min(r, s), max(r, s))
            delta_e[key] = delta_e.get(key, 0) + amount

        for t, c in zip(blocks, counts):
            c = int(c)
            if t == src:
                bump(src, src, -2 * c)
                bump(src, dst, c)
            elif t == dst:
                bump(src, dst, -c)
                bump(dst, dst, 2 * c)
            else:
                bump(src, t, -c)
                bump(dst, t, c)
        new_pairs = sum(self._f_entry(p, self.e[p] + delta_e.get(p, 0)) for p in pairs)
        new_blocks = self._f_block(self.er[src] - k) + self._f_block(self.er[dst] + k)
        # the pair sum enters the DL with a minus sign, the block sum with a plus
        delta = (old_pairs - new_pairs) + (new_blocks - old_blocks)
        occupied_after = self.occupied - (self.sizes[src] == 1) + (self.sizes[dst] == 0)
        if occupied_after != self.occupied:
            delta += self._penalty(occupied_after) - self._penalty(self.occupied)
        return delta

    def apply_move(self, node: int, dst: int, blocks: np.ndarray, counts: np.ndarray) -> None:
        src = self.labels[node]
        k = self.deg[node]
        for t, c in zip(blocks, counts):
            c = int(c)
            if t == src:
                self.e[src, src] -= 2 * c
                self.e[src, dst] += c
                self.e[dst, src] += c
            elif t == dst:
                self.e[src, dst] -= c
                self.e[dst, src] -= c
                self.e[dst, dst] += 2 * c
            else:
                self.e[src, t] -= c
                self.e[t, src] -= c
                self.e[dst, t] += c
                self.e[t, dst] += c
        self.er[src] -= k
        self.er[dst] += k
        self.labels[node] = dst
        self.sizes[src] -= 1
        self.sizes[dst] += 1
        if self.sizes[src] == 0:
            self.occupied -= 1
        if self.sizes[dst] == 1:
            self.occupied += 1

    # -- block merges ----------------------------------------------------
    def merge_delta(self, r: int, s: int) -> float:
        others = np.flatnonzero(self.sizes > 0)
        old = 0.0
        seen = set()
        for t in others:
            for a in (r, s):
                key = (min(a, t), max(a, t))
                if key not in seen:
                    seen.add(key)
                    old += self._f_entry(key, self.e[key])
        old_blocks = self._f_block(self.er[r]) + self._f_block(self.er[s])
        new = self._f_entry((r, r), self.e[r, r] + self.e[s, s] + 2 * self.e[r, s])
        for t in others:
            if t != r and t != s:
                new += self._f_entry((r, t), self.e[r, t] + self.e[s, t])
        new_blocks = self._f_block(self.er[r] + self.er[s])
        delta = -(new - old) + (new_blocks - old_blocks)
        delta += self._penalty(self.occupied - 1) - self._penalty(self.occupied)
        return delta

    def apply_merge(self, r: int, s: int) -> None:
        """Absorb block s into block r."""
        self.labels[self.labels == s] = r
        err = self.e[r, r] + self.e[s, s] + 2 * self.e[r, s]
        self.e[r, :] += self.e[s, :]
        self.e[:, r] += self.e[:, s]
        self.e[r, r] = err
        self.e[s, :] = 0
        self.e[:, s] = 0
        self.er[r] += self.er[s]
        self.er[s] = 0
        self.sizes[r] += self.sizes[s]
        self.sizes[s] = 0
        self.occupied -= 1

    def clone(self) -> "_GreedyState":
        other = object.__new__(_GreedyState)
        other.g = self.g
        other.n = self.n
        other.m = self.m
        other.max_blocks = self.max_blocks
        other.labels = self.labels.copy()
        other.deg = self.deg
        other.e = self.e.copy()
        other.er = self.er.copy()
        other.sizes = self.sizes.copy()
        other.occupied = self.occupied
        return other

    def best_merge(self) -> tuple[tuple[int, int] | None, float]:
        live = np.flatnonzero(self.sizes > 0)
        best, best_delta = None, np.inf
        for i, r in enumerate(live):
            for s in live[i + 1 :]:
                delta = self.merge_delta(int(r), int(s))
                if delta < best_delta:
                    best, best_delta = (int(r), int(s)), delta
        return best, best_delta


def infer_partition(g: SimpleGraph, seed: int | None = None, run_index: int = 0) -> InferenceRun:
    """One randomized greedy minimization of the description length.

    Starts from ceil(sqrt(n)) random blocks, then alternates (a) greedy
    best-improvement single-node moves to adjacent blocks and (b) best-pair
    block merges, each accepted only while the description length strictly
    decreases.
    """
    if g.m < 1:
        raise ValueError("inference requires at least one edge")
    rng = np.random.default_rng(seed)
    b0 = max(1, math.ceil(math.sqrt(g.n)))
    state = _GreedyState(g, rng.integers(0, b0, size=g.n))

    def move_phase() -> bool:
        any_moved = False
        for _ in range(200):  # safety cap; DL decrease guarantees termination
            moved = False
            for node in rng.permutation(g.n):
                blocks, counts = state._neighbor_block_counts(int(node))
                if len(blocks) == 0:
                    continue
                src = state.labels[node]
                best_dst, best_delta = -1, -_EPS
                for dst in blocks:
                    if dst == src:
                        continue
                    delta = state.move_delta(int(node), int(dst), blocks, counts)
                    if delta < best_delta:
                        best_dst, best_delta = int(dst), delta
                if best_dst >= 0:
                    state.apply_move(int(node), best_dst, blocks, counts)
                    moved = True
            any_moved = any_moved or moved
            if not moved:
                break
        return any_moved

    def merge_phase() -> bool:
        any_merged = False
        while state.occupied > 1:
            best, best_delta = state.best_merge()
            if best is not None and best_delta < -_EPS:
                state.apply_merge(*best)
                any_merged = True
                continue
            # no single merge improves; look ahead along the greedy merge
            # path to escape plateaus where only a run of merges pays off
            if state.occupied > _LOOKAHEAD_MAX:
                break
            clone = state.clone()
            sequence: list[tuple[int, int]] = []
            cumulative: list[float] = []
            total = 0.0
            while clone.occupied > 1:
                pair, delta = clone.best_merge()
                clone.apply_merge(*pair)
                total += delta
                sequence.append(pair)
                cumulative.append(total)
            cut = int(np.argmin(cumulative)) if cumulative else -1
            if cut < 0 or cumulative[cut] >= -_EPS:
                break
            for pair in sequence[: cut + 1]:
                state.apply_merge(*pair)
            any_merged = True
        return any_merged

    while True:
        move_phase()
        if not merge_phase():
            break  # moves are locally optimal and no merge helps

    labels = _compact_labels(state.labels)
    dl = description_length(g, labels)
    params = replace(params_from_graph(g, labels), description_length=dl)
    return InferenceRun(
        params=params,
        description_length=float(dl),
        run_index=run_index,
        seed=-1 if seed is None else int(seed),
    )


def sample_parameter_sets_detailed(
    g: SimpleGraph,
    runs: int = 100,
    samples: int = 50,
    seed: int | None = None,
    weighting: str = "inverse-dl",
) -> tuple[list[InferenceRun], list[BlockModelParams]]:
    """Run inference ``runs`` times and resample parameter sets.

    Selection is with replacement, weighted inversely proportional to the
    description length (``weighting="boltzmann"`` switches to
    exp(-(DL - DL_min)) weights). Returns all runs plus the selected sets.
    """
    if runs < 1 or samples < 1:
        raise ValueError("runs and samples must be positive")
    if weighting not in ("inverse-dl", "boltzmann"):
        raise ValueError(f"unknown weighting: {weighting!r}")
    rng = np.random.default_rng(seed)
    run_seeds = rng.integers(0, 2**63 - 1, size=runs)
    results = [infer_partition(g, seed=int(s), run_index=i) for i, s in enumerate(run_seeds)]
    dls = np.array([r.description_length for r in results])
    if weighting == "inverse-dl":
        weights = 1.0 / dls
    else:
        weights = np.exp(-(dls - dls.min()))
    weights /= weights.sum()
    picks = rng.choice(runs, size=samples, replace=True, p=weights)
    return results, [results[i].params for i in picks]


def sample_parameter_sets(
    g: SimpleGraph,
    runs: int = 100,
    samples: int = 50,
    seed: int | None = None,
    weighting: str = "inverse-dl",
) -> list[BlockModelParams]:
    """Parameter sets drawn from repeated inference; see the detailed variant."""
    _, selected = sample_parameter_sets_detailed(g, runs, samples, seed, weighting)
    return selected
