"""Hot inner loops, each in a numba and a pure-numpy flavour.

The module-level names (``push``, ``sweep_conductance``, ``grid_components``)
are bound to one flavour at import time according to
:data:`walkscan._jit.USE_NUMBA`. Both flavours accumulate in the same order,
so they agree bit for bit; ``tests/test_kernels.py`` checks this directly.

All graph kernels take the CSR triple ``(indptr, indices, degree)`` of a
:class:`walkscan.graph.Graph`.
"""

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from walkscan._jit import USE_NUMBA, njit

# Cap on grid cells per axis; keeps packed int64 keys exact and the floor()
# of coordinate/cell-side well away from float rounding.
_MAX_CELLS_PER_AXIS = 1 << 20


# ---------------------------------------------------------------------------
# helpers shared by the numpy paths
# ---------------------------------------------------------------------------


def gather_neighbors(indptr, indices, nodes):
    """Concatenated neighbor lists of ``nodes``.

    Returns ``(owner, nbrs)`` where ``owner[i]`` is the position in ``nodes``
    whose adjacency produced ``nbrs[i]``. Order follows ``nodes`` then the
    sorted adjacency.
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    starts = indptr[nodes]
    counts = indptr[nodes + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    owner = np.repeat(np.arange(nodes.size, dtype=np.int64), counts)
    offsets = np.cumsum(counts) - counts
    flat = np.arange(total, dtype=np.int64) - np.repeat(offsets, counts) + np.repeat(starts, counts)
    return owner, indices[flat]


# ---------------------------------------------------------------------------
# one walk step
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def push_numba(indptr, indices, degree, nodes, mass):
    n = degree.shape[0]
    acc = np.zeros(n)
    seen = np.zeros(n, np.bool_)
    bound = 0
    for i in range(nodes.shape[0]):
        bound += degree[nodes[i]]
    out = np.empty(bound, np.int64)
    k = 0
    for i in range(nodes.shape[0]):
        u = nodes[i]
        share = mass[i] / degree[u]
        for j in range(indptr[u], indptr[u + 1]):
            v = indices[j]
            if not seen[v]:
                seen[v] = True
                out[k] = v
                k += 1
            acc[v] += share
    support = np.sort(out[:k])
    return support, acc[support]


def push_numpy(indptr, indices, degree, nodes, mass):
    owner, nbrs = gather_neighbors(indptr, indices, nodes)
    if nbrs.size == 0:
        return np.empty(0, np.int64), np.empty(0, np.float64)
    shares = (mass / degree[nodes])[owner]
    support, inverse = np.unique(nbrs, return_inverse=True)
    # bincount adds in input order, matching the sequential numba loop
    return support, np.bincount(inverse, weights=shares, minlength=support.size)


# ---------------------------------------------------------------------------
# incremental conductance along a sweep
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _conductance_value(cut, vol, size, total_vol, n):
    if size == 0 or size == n:
        return 1.0
    if cut == 0:
        return 0.0
    other = total_vol - vol
    return cut / min(vol, other)


@njit(cache=True, nogil=True)
def sweep_conductance_numba(indptr, indices, degree, loops, seeds, ranked, total_vol):
    n = degree.shape[0]
    inside = np.zeros(n, np.bool_)
    m = ranked.shape[0]
    out = np.empty(m + 1)
    cut = 0
    vol = 0
    size = 0
    for i in range(seeds.shape[0] + m):
        v = seeds[i] if i < seeds.shape[0] else ranked[i - seeds.shape[0]]
        c = 0
        for j in range(indptr[v], indptr[v + 1]):
            w = indices[j]
            if w != v and inside[w]:
                c += 1
        cut += degree[v] - loops[v] - 2 * c
        vol += degree[v]
        size += 1
        inside[v] = True
        k = i - seeds.shape[0] + 1
        if k >= 0:
            out[k] = _conductance_value(cut, vol, size, total_vol, n)
    return out


def sweep_conductance_numpy(indptr, indices, degree, loops, seeds, ranked, total_vol):
    n = degree.shape[0]
    m = ranked.size
    pos = np.full(n, m + 1, dtype=np.int64)
    pos[seeds] = 0
    pos[ranked] = np.arange(1, m + 1)

    owner, nbrs = gather_neighbors(indptr, indices, seeds)
    internal = int(np.count_nonzero((pos[nbrs] == 0) & (nbrs != seeds[owner])))
    cut0 = int((degree[seeds] - loops[seeds]).sum()) - internal
    vol0 = int(degree[seeds].sum())

    owner, nbrs = gather_neighbors(indptr, indices, ranked)
    earlier = (pos[nbrs] <= owner) & (nbrs != ranked[owner])
    inside_counts = np.bincount(owner[earlier], minlength=m)
    delta = degree[ranked] - loops[ranked] - 2 * inside_counts
    cut = np.concatenate(([cut0], cut0 + np.cumsum(delta)))
    vol = np.concatenate(([vol0], vol0 + np.cumsum(degree[ranked])))
    size = seeds.size + np.arange(m + 1)

    out = np.empty(m + 1)
    sentinel = (size == 0) | (size == n)
    zero = ~sentinel & (cut == 0)
    rest = ~sentinel & ~zero
    out[sentinel] = 1.0
    out[zero] = 0.0
    out[rest] = cut[rest] / np.minimum(vol[rest], total_vol - vol[rest])
    return out


# ---------------------------------------------------------------------------
# d-threshold connected components over embedded points
# ---------------------------------------------------------------------------


def grid_keys(points, d):
    """Pack uniform-grid cell coordinates (side >= d) into sortable int64 keys.

    Returns ``(keys, positive_offsets)``: the key of each point's cell and the
    packed offsets of the neighbor cells with a positive packed value (each
    unordered pair of adjacent cells is visited once).
    """
    n, dim = points.shape
    lo = points.min(axis=0)
    span = float((points.max(axis=0) - lo).max()) if n else 0.0
    cap = min(_MAX_CELLS_PER_AXIS, int(2 ** (62 / dim)) - 4)
    side = max(d * (1.0 + 1e-9), span / cap) if span > 0 else d * (1.0 + 1e-9)
    cells = np.floor((points - lo) / side).astype(np.int64) + 1
    base = int(cells.max()) + 2 if n else 3
    weights = base ** np.arange(dim, dtype=np.int64)
    keys = cells @ weights
    grid = np.stack(np.meshgrid(*([np.array([-1, 0, 1])] * dim), indexing="ij"), -1).reshape(-1, dim)
    offsets = grid.astype(np.int64) @ weights
    return keys, np.sort(offsets[offsets > 0])


@njit(cache=True, nogil=True)
def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


@njit(cache=True, nogil=True)
def _within(points, i, j, d):
    s = 0.0
    for t in range(points.shape[1]):
        diff = points[i, t] - points[j, t]
        s += diff * diff
    return np.sqrt(s) <= d


@njit(cache=True, nogil=True)
def _link(parent, points, i, j, d):
    ri = _find(parent, i)
    rj = _find(parent, j)
    if ri != rj and _within(points, i, j, d):
        if ri < rj:
            parent[rj] = ri
        else:
            parent[ri] = rj


@njit(cache=True, nogil=True)
def _grid_roots_numba(points, keys, offsets, d):
    n = keys.shape[0]
    parent = np.arange(n)
    for i in range(n):
        j = i + 1
        while j < n and keys[j] == keys[i]:
            _link(parent, points, i, j, d)
            j += 1
        for o in offsets:
            target = keys[i] + o
            lo = np.searchsorted(keys, target)
            hi = np.searchsorted(keys, target, side="right")
            for j in range(lo, hi):
                _link(parent, points, i, j, d)
    for i in range(n):
        parent[i] = _find(parent, i)
    return parent


def _grid_edges_numpy(points, keys, offsets, d, chunk=1 << 22):
    n = keys.size
    idx = np.arange(n, dtype=np.int64)
    src_parts, dst_parts = [], []
    for o in np.concatenate(([0], offsets)):
        lo = np.searchsorted(keys, keys + o, side="left")
        hi = np.searchsorted(keys, keys + o, side="right")
        if o == 0:
            lo = np.maximum(lo, idx + 1)
        counts = np.maximum(hi - lo, 0)
        # chunk over source points so pair arrays stay bounded
        csum = np.cumsum(counts)
        start = 0
        while start < n:
            stop = int(np.searchsorted(csum, (csum[start - 1] if start else 0) + chunk, side="right"))
            stop = max(stop, start + 1)
            c = counts[start:stop]
            total = int(c.sum())
            if total:
                src = np.repeat(idx[start:stop], c)
                first = np.repeat(lo[start:stop] - (np.cumsum(c) - c), c)
                dst = first + np.arange(total, dtype=np.int64)
                s = np.zeros(total)
                for t in range(points.shape[1]):
                    diff = points[src, t] - points[dst, t]
                    s += diff * diff
                keep = np.sqrt(s) <= d
                src_parts.append(src[keep])
                dst_parts.append(dst[keep])
            start = stop
    if src_parts:
        return np.concatenate(src_parts), np.concatenate(dst_parts)
    return np.empty(0, np.int64), np.empty(0, np.int64)


def _grid_roots_numpy(points, keys, offsets, d):
    n = keys.size
    src, dst = _grid_edges_numpy(points, keys, offsets, d)
    adj = coo_matrix((np.ones(src.size, np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(adj, directed=False)
    return labels


def _grid_components(points, d, roots_fn):
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.shape[0] == 0:
        return np.empty(0, np.int64)
    keys, offsets = grid_keys(points, d)
    order = np.argsort(keys, kind="stable")
    roots = roots_fn(points[order], keys[order], offsets, d)
    labels = np.empty(order.size, np.int64)
    labels[order] = np.unique(roots, return_inverse=True)[1]
    # relabel by first appearance in input order for a canonical answer
    _, first = np.unique(labels, return_index=True)
    rank = np.empty(first.size, np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[labels]


def grid_components_numba(points, d):
    """Component label per point of the graph linking points within distance ``d``."""
    return _grid_components(points, d, _grid_roots_numba)


def grid_components_numpy(points, d):
    return _grid_components(points, d, _grid_roots_numpy)


if USE_NUMBA:
    push = push_numba
    sweep_conductance = sweep_conductance_numba
    grid_components = grid_components_numba
else:
    push = push_numpy
    sweep_conductance = sweep_conductance_numpy
    grid_components = grid_components_numpy
