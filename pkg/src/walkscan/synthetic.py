"""Planted overlapping communities, for tests and kernel benchmarks."""

import numpy as np

from walkscan.graph import CommunitySet, Graph


def planted_overlapping(
    n_communities: int,
    size: int,
    overlap: int,
    p_in: float,
    external_edges: int,
    rng_seed: int = 0,
) -> tuple[Graph, CommunitySet]:
    """Ring of ``n_communities`` blocks, consecutive blocks sharing ``overlap`` nodes.

    Each block is a G(size, p_in) random graph; ``external_edges`` uniform
    random edges are sprinkled on top.
    """
    if not 0 <= overlap < size:
        raise ValueError("need 0 <= overlap < size")
    rng = np.random.default_rng(rng_seed)
    stride = size - overlap
    n = stride * n_communities
    comms, parts = [], []
    iu, ju = np.triu_indices(size, k=1)
    for c in range(n_communities):
        members = (c * stride + np.arange(size)) % n
        comms.append(np.sort(members))
        keep = rng.random(iu.size) < p_in
        parts.append(np.column_stack((members[iu[keep]], members[ju[keep]])))
    ext = rng.integers(0, n, size=(external_edges, 2))
    parts.append(ext[ext[:, 0] != ext[:, 1]])
    g = Graph.from_edges(n, np.concatenate(parts))
    return g, CommunitySet(tuple(comms))
