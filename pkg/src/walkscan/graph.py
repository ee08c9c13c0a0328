"""Immutable undirected graph, SNAP-style loaders and hop-distance balls."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from walkscan.kernels import gather_neighbors

logger = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Malformed edge-list or community file."""


def as_nodeset(nodes: Iterable[int] | np.ndarray) -> np.ndarray:
    """Sorted, duplicate-free int64 array; the node-set representation used throughout."""
    arr = np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes, dtype=np.int64)
    return np.unique(arr.ravel())


def _readonly(arr):
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph in CSR form with dense 0-based node ids.

    ``degree[v]`` is the length of the adjacency list of ``v``; a self-loop
    appears once in the list and so contributes 1. ``ids[v]`` is the original
    (file) id of dense node ``v``.
    """

    indptr: np.ndarray
    indices: np.ndarray
    ids: np.ndarray
    degree: np.ndarray = field(init=False)
    loops: np.ndarray = field(init=False)
    _id_map: dict = field(init=False, repr=False)

    def __post_init__(self):
        n = self.ids.size
        if self.indptr.size != n + 1:
            raise ValueError("indptr length must be node_count + 1")
        degree = np.diff(self.indptr)
        loops = np.zeros(n, dtype=np.int64)
        owner = np.repeat(np.arange(n, dtype=np.int64), degree)
        loops[owner[self.indices == owner]] = 1
        object.__setattr__(self, "degree", _readonly(degree))
        object.__setattr__(self, "loops", _readonly(loops))
        object.__setattr__(self, "_id_map", {})
        for name in ("indptr", "indices", "ids"):
            _readonly(getattr(self, name))

    @classmethod
    def from_edges(cls, node_count: int, edges, ids=None) -> "Graph":
        """Build from dense-id pairs; duplicates collapse, loops are kept once."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= node_count):
            raise ValueError("edge endpoint out of range")
        u, v = edges[:, 0], edges[:, 1]
        loop = u == v
        src = np.concatenate((u, v[~loop]))
        dst = np.concatenate((v, u[~loop]))
        packed = np.unique(src * max(node_count, 1) + dst)
        src, dst = np.divmod(packed, max(node_count, 1))
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=node_count), out=indptr[1:])
        if ids is None:
            ids = np.arange(node_count, dtype=np.int64)
        return cls(indptr, dst.astype(np.int64), np.asarray(ids, dtype=np.int64).copy())

    @property
    def node_count(self) -> int:
        return self.ids.size

    @property
    def total_volume(self) -> int:
        return int(self.indices.size)

    @property
    def edge_count(self) -> int:
        """Undirected edges, each self-loop counted once."""
        return (self.indices.size - int(self.loops.sum())) // 2 + int(self.loops.sum())

    def adjacency(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def edges(self) -> np.ndarray:
        """Each undirected edge once as a dense ``(u, v)`` row with ``u <= v``."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degree)
        keep = src <= self.indices
        return np.column_stack((src[keep], self.indices[keep]))

    def index_of(self, original_id: int) -> int:
        """Dense id of an original node id (KeyError if absent)."""
        if not self._id_map:
            self._id_map.update(zip(self.ids.tolist(), range(self.node_count)))
        return self._id_map[int(original_id)]

    def to_dense_ids(self, original_ids: Iterable[int]) -> np.ndarray:
        return as_nodeset([self.index_of(i) for i in original_ids])

    def to_original_ids(self, nodes) -> np.ndarray:
        return self.ids[np.asarray(nodes, dtype=np.int64)]


@dataclass(frozen=True)
class CommunitySet(Sequence):
    """Ordered ground-truth communities as dense node sets."""

    communities: tuple
    skipped_empty: int = 0

    def __getitem__(self, i):
        return self.communities[i]

    def __len__(self):
        return len(self.communities)


def _parse_int(token: str, path, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise GraphFormatError(f"{path}:{lineno}: non-integer token {token!r}") from None
    if value < 0:
        raise GraphFormatError(f"{path}:{lineno}: negative node id {value}")
    return value


def load_edge_list(path) -> Graph:
    """Read a whitespace-separated ``u v`` edge list ('#' lines are comments)."""
    path = Path(path)
    pairs = []
    try:
        fh = path.open()
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            if line.startswith("#"):
                continue
            tokens = line.split()
            if not tokens:
                continue
            if len(tokens) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected 2 ids, got {len(tokens)}")
            pairs.append((_parse_int(tokens[0], path, lineno), _parse_int(tokens[1], path, lineno)))
    raw = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    ids, dense = np.unique(raw, return_inverse=True)
    return Graph.from_edges(ids.size, dense.reshape(-1, 2), ids=ids)


def write_edge_list(g: Graph, path) -> None:
    """Write each undirected edge once, using original ids."""
    e = g.edges()
    with Path(path).open("w") as fh:
        fh.write(f"# nodes: {g.node_count} edges: {g.edge_count}\n")
        for u, v in g.ids[e].tolist():
            fh.write(f"{u}\t{v}\n")


def load_communities(path, g: Graph, max_count: int | None = None) -> CommunitySet:
    """Read one community per line (SNAP ``.cmty``), mapped to dense ids.

    Returns the first ``max_count`` non-empty lines in file order.
    """
    path = Path(path)
    out = []
    skipped = 0
    try:
        fh = path.open()
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            if max_count is not None and len(out) >= max_count:
                break
            if line.startswith("#"):
                continue
            tokens = line.split()
            if not tokens:
                skipped += 1
                continue
            members = []
            for tok in tokens:
                orig = _parse_int(tok, path, lineno)
                try:
                    members.append(g.index_of(orig))
                except KeyError:
                    raise GraphFormatError(f"{path}:{lineno}: node id {orig} not in graph") from None
            out.append(_readonly(as_nodeset(members)))
    if skipped:
        logger.warning("%s: skipped %d empty community line(s)", path, skipped)
    return CommunitySet(tuple(out), skipped)


def nodes_within_distance(g: Graph, c, hops: int) -> np.ndarray:
    """All nodes at BFS distance at most ``hops`` from the set ``c`` (``c`` included)."""
    if hops < 0:
        raise ValueError("hops must be >= 0")
    ball = as_nodeset(c)
    if ball.size == 0:
        return ball
    seen = np.zeros(g.node_count, dtype=bool)
    seen[ball] = True
    frontier = ball
    for _ in range(hops):
        _, nbrs = gather_neighbors(g.indptr, g.indices, frontier)
        nbrs = np.unique(nbrs)
        frontier = nbrs[~seen[nbrs]]
        if frontier.size == 0:
            break
        seen[frontier] = True
    return np.flatnonzero(seen)


def node_memberships(communities: CommunitySet, node_count: int) -> list[list[int]]:
    """For each node, indices of the communities containing it."""
    member_of = [[] for _ in range(node_count)]
    for j, c in enumerate(communities):
        for v in c.tolist():
            member_of[v].append(j)
    return member_of


def trial_rng(master_seed: int, *counters: int) -> np.random.Generator:
    """Generator for one trial: seeded by ``[master_seed, *counters]``.

    Counters identify the trial (experiment code, grid point, trial index), so
    any single trial can be reproduced without replaying the others.
    """
    return np.random.default_rng([int(master_seed), *(int(c) for c in counters)])


def sample_seeds(g: Graph, candidates, size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample without replacement of positive-degree ``candidates``.

    ``size`` is capped at the number of usable candidates; an empty array
    means no candidate has positive degree.
    """
    candidates = as_nodeset(candidates)
    usable = candidates[g.degree[candidates] > 0]
    size = min(int(size), usable.size)
    if size <= 0:
        return np.empty(0, np.int64)
    return np.sort(rng.choice(usable, size=size, replace=False))
