"""Two-list batch sampling estimator for the mean geodesic distance.

Reachable pairs are sampled uniformly at random (component chosen with
probability proportional to its reachable-pair count, then a distinct pair
uniformly inside it). Each batch is split between two running lists; sampling
stops once the list means agree within a threshold, and the pooled mean of
both lists is returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import SimpleGraph, connected_components


@dataclass(frozen=True)
class EstimatorConfig:
    batch_size: int = 1000
    threshold: float = 0.1
    max_batches: int = 1000
    seed: int | None = None

    def __post_init__(self):
        if self.batch_size <= 0 or self.batch_size % 2 != 0:
            raise ValueError("batch_size must be positive and even")
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.max_batches < 1:
            raise ValueError("max_batches must be at least 1")


@dataclass(frozen=True)
class GeodesicEstimate:
    """Estimator output: pooled mean, batches consumed, convergence flag.

    ``value`` is None when the graph has no reachable pair at all.
    """

    value: float | None
    batches: int
    converged: bool


def estimate_mean_geodesic(g: SimpleGraph, config: EstimatorConfig | None = None) -> GeodesicEstimate:
    config = config or EstimatorConfig()
    part = connected_components(g)
    pair_counts = part.sizes.astype(np.float64) * (part.sizes - 1) / 2.0
    eligible = np.flatnonzero(pair_counts > 0)
    if len(eligible) == 0:
        return GeodesicEstimate(value=None, batches=0, converged=False)
    weights = pair_counts[eligible]
    weights /= weights.sum()
    sizes = part.sizes[eligible]

    # nodes grouped by component: order[start[c]:start[c]+sizes[c]] lists component c
    order = np.argsort(part.labels, kind="stable")
    comp_start = np.zeros(len(part.sizes), dtype=np.int64)
    np.cumsum(part.sizes[:-1], out=comp_start[1:])
    starts = comp_start[eligible]

    rng = np.random.default_rng(config.seed)
    half = config.batch_size // 2
    sum_one = sum_two = 0
    count = 0  # per list; both lists always hold `count` samples
    batches = 0
    converged = False
    while batches < config.max_batches:
        chosen = rng.choice(len(eligible), size=config.batch_size, p=weights)
        size_c = sizes[chosen]
        a = rng.integers(0, size_c)
        b = rng.integers(0, size_c - 1)
        b = b + (b >= a)  # uniform distinct pair within the component
        src = order[starts[chosen] + a]
        dst = order[starts[chosen] + b]
        dists = kernels.pair_distances(g.indptr, g.indices, src.astype(np.int64), dst.astype(np.int64))
        sum_one += int(dists[:half].sum())
        sum_two += int(dists[half:].sum())
        count += half
        batches += 1
        if abs(sum_one - sum_two) / count < config.threshold:
            converged = True
            break
    pooled = (sum_one + sum_two) / (2 * count)
    return GeodesicEstimate(value=pooled, batches=batches, converged=converged)
