"""Precision/recall/F1 against a target community, and conductance."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from walkscan.graph import Graph, as_nodeset


class F1Report(NamedTuple):
    precision: float
    recall: float
    f1: float
    intersection: int


def harmonic_mean(a: float, b: float) -> float:
    """2ab/(a+b), with H(0, 0) = 0."""
    if a + b == 0:
        return 0.0
    return 2.0 * a * b / (a + b)


def f1_score(found, target) -> F1Report:
    found = as_nodeset(found)
    target = as_nodeset(target)
    if target.size == 0:
        raise ValueError("target community is empty")
    hits = int(np.intersect1d(found, target, assume_unique=True).size)
    precision = hits / found.size if found.size else 0.0
    recall = hits / target.size
    return F1Report(precision, recall, harmonic_mean(precision, recall), hits)


class Conductance(NamedTuple):
    value: float
    degenerate: bool  # x empty or x == V; value is then the sentinel 1.0


def conductance_report(g: Graph, x) -> Conductance:
    x = as_nodeset(x)
    if x.size == 0 or x.size == g.node_count:
        return Conductance(1.0, True)
    inside = np.zeros(g.node_count, dtype=bool)
    inside[x] = True
    vol = int(g.degree[x].sum())
    src = np.repeat(np.arange(g.node_count), g.degree)
    cut = int(np.count_nonzero(inside[src] & ~inside[g.indices]))
    if cut == 0:
        return Conductance(0.0, False)
    return Conductance(cut / min(vol, g.total_volume - vol), False)


def conductance(g: Graph, x) -> float:
    """cut(x) / min(vol(x), vol(V \\ x)); self-loops add to volume, never to the cut.

    Degenerate ``x`` (empty or all of V) yields the worst value 1.0; use
    :func:`conductance_report` to tell the two apart.
    """
    return conductance_report(g, x).value
