"""Small named graphs used as exact-solver fixtures."""

from __future__ import annotations

import numpy as np

from graphs.core import Graph, Provenance


def path_graph(n: int) -> Graph:
    """P_n: vertices 0..n-1 in a line, embedded on the integer axis."""
    edges = np.stack([np.arange(n - 1), np.arange(1, n)], axis=1)
    coords = np.arange(n, dtype=np.int64)[:, None]
    return Graph(n, edges, coords, Provenance.of("path", 0, n))


def cycle_graph(n: int) -> Graph:
    edges = np.stack([np.arange(n), (np.arange(n) + 1) % n], axis=1)
    return Graph(n, edges, None, Provenance.of("cycle", 0, n))


def star_graph(leaves: int) -> Graph:
    """Centre 0 joined to leaves 1..k."""
    edges = np.stack([np.zeros(leaves, dtype=np.int64), np.arange(1, leaves + 1)], axis=1)
    return Graph(leaves + 1, edges, None, Provenance.of("star", 0, leaves))


def complete_graph(n: int) -> Graph:
    iu = np.triu_indices(n, k=1)
    return Graph(n, np.stack(iu, axis=1), None, Provenance.of("complete", 0, n))


def zoo() -> dict[str, Graph]:
    """P2..P5, the 4-cycle and the star with four leaves."""
    graphs = {f"P{k}": path_graph(k) for k in range(2, 6)}
    graphs["C4"] = cycle_graph(4)
    graphs["S4"] = star_graph(4)
    return graphs
