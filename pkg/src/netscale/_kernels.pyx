# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled graph kernels.

Hot loops shared by the measures, the geodesic estimator, and the
configuration-model sampler: full BFS distance aggregation, single-pair
truncated BFS, triangle counting on sorted adjacency, and double-edge swaps.
The pure-Python twin lives in ``_kernels_py``; both expose the same API and
produce identical results for identical inputs.
"""

import numpy as np

from libc.stdint cimport int8_t, int32_t, int64_t, uint64_t
from libcpp.unordered_set cimport unordered_set


def connected_components(const int64_t[::1] indptr, const int32_t[::1] indices):
    """Label nodes by connected component (BFS). Returns int64 array."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] label = out
    queue_arr = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] queue = queue_arr
    cdef Py_ssize_t s, head, tail
    cdef int32_t u, v
    cdef int64_t j, comp = 0
    for s in range(n):
        if label[s] >= 0:
            continue
        label[s] = comp
        queue[0] = <int32_t> s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if label[v] < 0:
                    label[v] = comp
                    queue[tail] = v
                    tail += 1
        comp += 1
    return out


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def geodesic_sum(const int64_t[::1] indptr, const int32_t[::1] indices):
    """Sum and count of hop distances over ordered reachable pairs s != t.

    Multi-source bit-parallel BFS: 64 sources advance together, one bit per
    source in a 64-bit mask per node; frontier expansion ORs masks along
    edges and popcounts the newly reached (source, node) pairs per level.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    seen_arr = np.zeros(n, dtype=np.uint64)
    cur_mask_arr = np.zeros(n, dtype=np.uint64)
    nxt_mask_arr = np.zeros(n, dtype=np.uint64)
    cur_nodes_arr = np.empty(n, dtype=np.int32)
    nxt_nodes_arr = np.empty(n, dtype=np.int32)
    cdef uint64_t[::1] seen = seen_arr
    cdef uint64_t[::1] cur_mask = cur_mask_arr
    cdef uint64_t[::1] nxt_mask = nxt_mask_arr
    cdef int32_t[::1] cur_nodes = cur_nodes_arr
    cdef int32_t[::1] nxt_nodes = nxt_nodes_arr
    cdef Py_ssize_t base, width, i, idx, cur_count, nxt_count, new_count
    cdef int32_t u, v
    cdef int64_t j, depth, total = 0, pairs = 0
    cdef uint64_t fu, old, fresh
    cdef int pc
    for base in range(0, n, 64):
        width = 64 if n - base >= 64 else n - base
        seen_arr.fill(0)
        cur_count = width
        for i in range(width):
            u = <int32_t> (base + i)
            cur_nodes[i] = u
            cur_mask[u] = (<uint64_t> 1) << i
            seen[u] = cur_mask[u]
        depth = 0
        while cur_count > 0:
            depth += 1
            nxt_count = 0
            for idx in range(cur_count):
                u = cur_nodes[idx]
                fu = cur_mask[u]
                cur_mask[u] = 0
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    old = nxt_mask[v]
                    nxt_mask[v] = old | fu
                    if old == 0:
                        nxt_nodes[nxt_count] = v
                        nxt_count += 1
            new_count = 0
            for idx in range(nxt_count):
                v = nxt_nodes[idx]
                fresh = nxt_mask[v] & ~seen[v]
                nxt_mask[v] = 0
                if fresh != 0:
                    seen[v] = seen[v] | fresh
                    pc = __builtin_popcountll(fresh)
                    total += depth * pc
                    pairs += pc
                    cur_mask[v] = fresh
                    cur_nodes[new_count] = v
                    new_count += 1
            cur_count = new_count
    return total, pairs


def pair_distances(const int64_t[::1] indptr, const int32_t[::1] indices,
                   const int64_t[::1] src, const int64_t[::1] dst):
    """Hop distance for each (src, dst) pair via BFS truncated at the target.

    Returns -1 for unreachable pairs; callers sample reachable pairs only.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t npairs = src.shape[0]
    out_arr = np.empty(npairs, dtype=np.int64)
    dist_arr = np.empty(n, dtype=np.int32)
    seen_arr = np.full(n, -1, dtype=np.int32)
    queue_arr = np.empty(n, dtype=np.int32)
    cdef int64_t[::1] out = out_arr
    cdef int32_t[::1] dist = dist_arr
    cdef int32_t[::1] seen = seen_arr
    cdef int32_t[::1] queue = queue_arr
    cdef Py_ssize_t k, head, tail
    cdef int32_t u, v, stamp, t
    cdef int64_t j, s, found
    for k in range(npairs):
        s = src[k]
        t = <int32_t> dst[k]
        if s == t:
            out[k] = 0
            continue
        stamp = <int32_t> (k % 2147483647)
        if stamp == 0:  # stamps recycle; reset the table at wraparound
            seen_arr.fill(-1)
        found = -1
        seen[s] = stamp
        dist[s] = 0
        queue[0] = <int32_t> s
        head = 0
        tail = 1
        while head < tail and found < 0:
            u = queue[head]
            head += 1
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if seen[v] != stamp:
                    seen[v] = stamp
                    dist[v] = dist[u] + 1
                    if v == t:
                        found = dist[v]
                        break
                    queue[tail] = v
                    tail += 1
        out[k] = found
    return out_arr


def triangle_count(const int64_t[::1] indptr, const int32_t[::1] indices):
    """Number of triangles, each counted once (ordered merge intersection)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef int64_t total = 0
    cdef int64_t ju, jv, au, av, bu, bv
    cdef int32_t u, v, wu, wv
    for u in range(<int32_t> n):
        au = indptr[u]
        bu = indptr[u + 1]
        for ju in range(au, bu):
            v = indices[ju]
            if v <= u:
                continue
            # common neighbors w > v close each triangle u < v < w exactly once
            jv = indptr[v]
            bv = indptr[v + 1]
            av = ju + 1  # adj[u] entries past v
            while av < bu and jv < bv:
                wu = indices[av]
                wv = indices[jv]
                if wv <= v:
                    jv += 1
                elif wu == wv:
                    total += 1
                    av += 1
                    jv += 1
                elif wu < wv:
                    av += 1
                else:
                    jv += 1
    return total


cdef inline int64_t _pair_key(int64_t a, int64_t b, int64_t n) nogil:
    if a < b:
        return a * n + b
    return b * n + a


def double_edge_swap_chunk(int64_t[::1] eu, int64_t[::1] ev, int64_t n,
                           const int64_t[::1] pick1, const int64_t[::1] pick2,
                           const int8_t[::1] orient):
    """Apply a chunk of double-edge swap attempts in place.

    ``pick1``/``pick2`` index into the edge arrays and ``orient`` selects one
    of the two rewiring pairings. Attempts creating a self-loop or multi-edge
    (or picking the same edge twice) are rejected. Returns accepted count.
    """
    cdef Py_ssize_t m = eu.shape[0]
    cdef unordered_set[int64_t] present
    present.reserve(2 * m)
    cdef Py_ssize_t i
    for i in range(m):
        present.insert(_pair_key(eu[i], ev[i], n))
    cdef Py_ssize_t t, attempts = pick1.shape[0]
    cdef int64_t e1, e2, a, b, c, d, tmp, k1, k2
    cdef int64_t accepted = 0
    for t in range(attempts):
        e1 = pick1[t]
        e2 = pick2[t]
        if e1 == e2:
            continue
        a = eu[e1]
        b = ev[e1]
        c = eu[e2]
        d = ev[e2]
        if orient[t]:
            tmp = c
            c = d
            d = tmp
        # propose (a,d), (c,b)
        if a == d or c == b:
            continue
        k1 = _pair_key(a, d, n)
        k2 = _pair_key(c, b, n)
        if k1 == k2 or present.count(k1) or present.count(k2):
            continue
        present.erase(_pair_key(a, b, n))
        present.erase(_pair_key(c, d, n))
        present.insert(k1)
        present.insert(k2)
        if a < d:
            eu[e1] = a
            ev[e1] = d
        else:
            eu[e1] = d
            ev[e1] = a
        if c < b:
            eu[e2] = c
            ev[e2] = b
        else:
            eu[e2] = b
            ev[e2] = c
        accepted += 1
    return accepted
