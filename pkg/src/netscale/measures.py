"""Exact structural measures on a SimpleGraph.

The four measures: mean degree 2m/n, mean geodesic distance over reachable
pairs, global clustering (3*triangles / connected triples), and degree
assortativity (Pearson correlation of endpoint degrees over edges).

Degenerate cases return ``None`` rather than a silent zero: a triangle-free
graph has C undefined only when it has no connected triple at all, and a
regular graph has undefined assortativity. Downstream fitting excludes
``None`` values explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import SimpleGraph

CSV_FIELDS = (
    "n",
    "m",
    "mean_degree",
    "mean_geodesic",
    "clustering",
    "assortativity",
    "source",
    "seed",
)


@dataclass(frozen=True)
class MeasureRecord:
    """Per-network measure bundle with provenance."""

    n: int
    m: int
    mean_degree: float
    mean_geodesic: float | None
    clustering: float | None
    assortativity: float | None
    source: str = "empirical"
    seed: int | None = None

    def to_json_dict(self) -> dict:
        return {name: getattr(self, name) for name in CSV_FIELDS}

    def to_csv_row(self) -> list[str]:
        row = []
        for name in CSV_FIELDS:
            value = getattr(self, name)
            row.append("" if value is None else repr(value) if isinstance(value, float) else str(value))
        return row


def mean_degree(g: SimpleGraph) -> float:
    if g.n == 0:
        raise ValueError("mean degree undefined for the empty graph")
    return 2.0 * g.m / g.n


def mean_geodesic_exact(g: SimpleGraph) -> float | None:
    """Mean hop distance over reachable pairs; one BFS per node.

    Returns None when no pair of nodes is connected by a path.
    """
    total, pairs = kernels.geodesic_sum(g.indptr, g.indices)
    if pairs == 0:
        return None
    return total / pairs


def triangle_triple_counts(g: SimpleGraph) -> tuple[int, int]:
    """(#triangles, #connected triples); triples = sum over nodes of C(deg, 2)."""
    triangles = int(kernels.triangle_count(g.indptr, g.indices))
    deg = g.degrees().astype(np.int64)
    triples = int((deg * (deg - 1) // 2).sum())
    return triangles, triples


def global_clustering(g: SimpleGraph) -> float | None:
    triangles, triples = triangle_triple_counts(g)
    if triples == 0:
        return None
    return 3.0 * triangles / triples


def degree_assortativity(g: SimpleGraph) -> float | None:
    """Pearson correlation of endpoint degrees, one symmetric term per edge.

    Undefined (None) when every edge endpoint has the same degree, e.g. on
    regular graphs, where the correlation denominator vanishes.
    """
    if g.m == 0:
        raise ValueError("assortativity undefined without edges")
    u, v = g.edge_arrays()
    deg = g.degrees()
    j = deg[u].astype(np.float64)
    k = deg[v].astype(np.float64)
    if np.all(j == j[0]) and np.all(k == j[0]):
        return None
    mean_prod = np.mean(j * k)
    mean_half_sum = np.mean(0.5 * (j + k))
    mean_half_sq = np.mean(0.5 * (j * j + k * k))
    denom = mean_half_sq - mean_half_sum**2
    if denom <= 0:
        return None
    return float((mean_prod - mean_half_sum**2) / denom)


def compute_measures(
    g: SimpleGraph,
    source: str = "empirical",
    seed: int | None = None,
    mean_geodesic: float | None | str = "exact",
) -> MeasureRecord:
    """Bundle all four measures into a record.

    ``mean_geodesic="exact"`` computes the exact value; pass a float (or
    None) to record a value obtained elsewhere, e.g. the sampling estimator.
    """
    if mean_geodesic == "exact":
        geo = mean_geodesic_exact(g)
    else:
        geo = mean_geodesic
    return MeasureRecord(
        n=g.n,
        m=g.m,
        mean_degree=mean_degree(g),
        mean_geodesic=geo,
        clustering=global_clustering(g),
        assortativity=degree_assortativity(g) if g.m else None,
        source=source,
        seed=seed,
    )
