"""Edge-list parsing, simplification, and the immutable simple-graph type.

All downstream analysis consumes :class:`SimpleGraph`: an undirected simple
graph stored as CSR adjacency (sorted neighbor lists over dense node indices).
Raw inputs may be directed, weighted, and non-simple; :func:`simplify` drops
direction and weights, collapses multi-edges, and removes self-loops.
"""

from __future__ import annotations

import gzip
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "ParseError",
    "RawEdgeList",
    "SimplifyStats",
    "SimpleGraph",
    "ComponentPartition",
    "parse_edge_list",
    "read_edge_list",
    "simplify",
    "connected_components",
    "degree_sequence",
    "write_label_map",
]

COMMENT_PREFIXES = ("#", "%")


class ParseError(ValueError):
    """Malformed edge-list input; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass
class RawEdgeList:
    """Edge records as they appear in the input, before simplification.

    ``edges`` holds ``(source, target, weight-or-None)`` with labels kept
    verbatim; duplicates and self-loops are permitted here.
    """

    edges: list[tuple[str, str, float | None]] = field(default_factory=list)
    directed: bool = False
    node_count_hint: int | None = None


@dataclass(frozen=True)
class SimplifyStats:
    """What simplification discarded, for provenance reporting."""

    multi_edges_collapsed: int = 0
    self_loops_removed: int = 0
    fractional_weights_seen: int = 0
    loop_only_nodes: int = 0


@dataclass(frozen=True)
class SimpleGraph:
    """Immutable undirected simple graph in CSR form.

    ``indptr`` is int64 of length n+1; ``indices`` is int32 holding the
    sorted neighbor list of each node. ``labels[i]`` is the original token
    for node index ``i`` when the graph came from an edge list.
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: tuple[str, ...] | None = None
    stats: SimplifyStats | None = None

    def __post_init__(self):
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Each undirected edge once, as (u, v) arrays with u < v."""
        u = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        v = self.indices.astype(np.int64)
        keep = u < v
        return u[keep], v[keep]

    @classmethod
    def from_edges(
        cls,
        n: int,
        u: np.ndarray | Sequence[int],
        v: np.ndarray | Sequence[int],
        labels: tuple[str, ...] | None = None,
    ) -> "SimpleGraph":
        """Build from an already-simple edge set; raises on loops/duplicates."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if u.shape != v.shape:
            raise ValueError("endpoint arrays differ in length")
        if len(u) and (u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n):
            raise ValueError("node index out of range")
        if np.any(u == v):
            raise ValueError("self-loop in edge set")
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        order = np.lexsort((hi, lo))
        lo, hi = lo[order], hi[order]
        if len(lo) > 1 and np.any((lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])):
            raise ValueError("duplicate edge in edge set")
        return cls(*_build_csr(n, lo, hi), labels=labels)

    def validate(self) -> None:
        """Assert the simple-graph invariants; used by tests and generators."""
        n = self.n
        deg = self.degrees()
        if self.indptr[0] != 0 or self.indptr[-1] != len(self.indices):
            raise AssertionError("corrupt indptr")
        for i in range(n):
            nbrs = self.neighbors(i)
            if len(nbrs) and (np.any(np.diff(nbrs) <= 0) or np.any(nbrs == i)):
                raise AssertionError(f"neighbor list of {i} unsorted, duplicated, or loopy")
        u, v = self.edge_arrays()
        if len(u) != self.m or deg.sum() != 2 * self.m:
            raise AssertionError("edge count inconsistent with degrees")
        # symmetry: every (u,v) must appear as (v,u)
        fwd = set(zip(u.tolist(), v.tolist()))
        for i in range(n):
            for j in self.neighbors(i):
                if (min(i, j), max(i, j)) not in fwd:
                    raise AssertionError("asymmetric adjacency")


@dataclass(frozen=True)
class ComponentPartition:
    """Connected-component id per node plus component sizes."""

    labels: np.ndarray
    sizes: np.ndarray

    @property
    def n_components(self) -> int:
        return len(self.sizes)

    def members(self, component: int) -> np.ndarray:
        return np.flatnonzero(self.labels == component)


def _build_csr(n: int, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    deg = np.bincount(lo, minlength=n) + np.bincount(hi, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    order = np.lexsort((dst, src))
    return indptr, dst[order].astype(np.int32)


def _iter_lines(stream: Iterable[str] | str) -> Iterator[str]:
    if isinstance(stream, str):
        return iter(io.StringIO(stream))
    return iter(stream)


def parse_edge_list(
    stream: Iterable[str] | str,
    delimiter: str | None = None,
    weights: str = "auto",
    directed: bool = False,
    node_count_hint: int | None = None,
) -> RawEdgeList:
    """Parse an edge-list text stream into a :class:`RawEdgeList`.

    Lines starting with '#' or '%' are comments; blank lines are skipped.
    ``delimiter=None`` splits on any whitespace. ``weights`` is one of
    ``auto`` (third column kept as weight when numeric), ``required``
    (third column must be numeric), or ``ignore``.
    """
    if weights not in ("auto", "required", "ignore"):
        raise ValueError(f"unknown weights mode: {weights!r}")
    edges: list[tuple[str, str, float | None]] = []
    for lineno, line in enumerate(_iter_lines(stream), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(COMMENT_PREFIXES):
            continue
        tokens = stripped.split(delimiter)
        if len(tokens) < 2:
            raise ParseError(f"expected at least 2 columns, got {len(tokens)}", lineno)
        weight: float | None = None
        if len(tokens) >= 3 and weights != "ignore":
            try:
                weight = float(tokens[2])
            except ValueError:
                if weights == "required":
                    raise ParseError(f"non-numeric weight {tokens[2]!r}", lineno) from None
                weight = None
        elif weights == "required":
            raise ParseError("weight column missing", lineno)
        edges.append((tokens[0], tokens[1], weight))
    return RawEdgeList(edges=edges, directed=directed, node_count_hint=node_count_hint)


def read_edge_list(path: str | Path, **kwargs) -> RawEdgeList:
    """Read an edge list from a plain or gzip-compressed file."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8") as fh:
        return parse_edge_list(fh, **kwargs)


def simplify(raw: RawEdgeList) -> SimpleGraph:
    """Apply the standard simplification to a raw edge list.

    Direction and weights are dropped, duplicate undirected pairs collapse to
    one edge, and self-loops are removed. Node labels compact to 0..n-1 in
    first-appearance order; nodes appearing only in self-loops are retained
    as degree-0 nodes (their count is reported in ``stats``).
    """
    index: dict[str, int] = {}
    us = np.empty(len(raw.edges), dtype=np.int64)
    vs = np.empty(len(raw.edges), dtype=np.int64)
    fractional = 0
    for k, (a, b, w) in enumerate(raw.edges):
        ia = index.setdefault(a, len(index))
        ib = index.setdefault(b, len(index))
        us[k] = ia
        vs[k] = ib
        if w is not None and w != int(w):
            fractional += 1
    n = max(len(index), raw.node_count_hint or 0)

    loops = us == vs
    loop_nodes = np.unique(us[loops])
    lo = np.minimum(us[~loops], vs[~loops])
    hi = np.maximum(us[~loops], vs[~loops])
    if len(lo):
        pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
        lo, hi = pairs[:, 0], pairs[:, 1]
    indptr, indices = _build_csr(n, lo, hi)

    degree = np.diff(indptr)
    stats = SimplifyStats(
        multi_edges_collapsed=int(np.count_nonzero(~loops)) - len(lo),
        self_loops_removed=int(np.count_nonzero(loops)),
        fractional_weights_seen=fractional,
        loop_only_nodes=int(np.count_nonzero(degree[loop_nodes] == 0)) if len(loop_nodes) else 0,
    )
    labels = tuple(index)
    if n > len(labels):
        labels = labels + tuple(str(i) for i in range(len(labels), n))
    return SimpleGraph(indptr, indices, labels=labels, stats=stats)


def connected_components(g: SimpleGraph) -> ComponentPartition:
    from . import kernels

    labels = kernels.connected_components(g.indptr, g.indices)
    sizes = np.bincount(labels) if len(labels) else np.empty(0, dtype=np.int64)
    return ComponentPartition(labels=labels, sizes=sizes.astype(np.int64))


def degree_sequence(g: SimpleGraph) -> np.ndarray:
    return g.degrees()


def write_label_map(g: SimpleGraph, path: str | Path) -> None:
    """Emit the index -> original-label map as two-column text."""
    if g.labels is None:
        raise ValueError("graph carries no label map")
    with open(path, "w", encoding="utf-8") as fh:
        for i, label in enumerate(g.labels):
            fh.write(f"{i}\t{label}\n")
