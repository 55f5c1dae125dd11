"""Union-find over dense integer ids."""

from __future__ import annotations

import numpy as np


class UnionFind:
    """Disjoint sets on ``0..n-1`` with union by size and path compression.

    Used where edges arrive one at a time (Kruskal). Whole-graph labelling goes
    through :func:`label_components`, which does the same hooking and
    compression with array operations.
    """

    def __init__(self, n: int) -> None:
        self._parent = list(range(n))
        self._size = [1] * n
        self.num_sets = n

    def find(self, x: int) -> int:
        parent = self._parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of ``a`` and ``b``; False if they were already one set."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        self.num_sets -= 1
        return True

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def set_size(self, x: int) -> int:
        return self._size[self.find(x)]


def label_components(num_vertices: int, edges: np.ndarray) -> np.ndarray:
    """Label every vertex with the smallest vertex id of its component.

    Roots are hooked under the smaller root across every edge, then the parent
    array is compressed by pointer jumping until each entry points at a root.
    Rounds repeat until no edge joins two different roots.
    """
    parent = np.arange(num_vertices, dtype=np.int64)
    if num_vertices == 0 or len(edges) == 0:
        return parent
    u = edges[:, 0]
    v = edges[:, 1]
    while True:
        pu = parent[u]
        pv = parent[v]
        differ = pu != pv
        if not differ.any():
            return parent
        lo = np.minimum(pu[differ], pv[differ])
        hi = np.maximum(pu[differ], pv[differ])
        np.minimum.at(parent, hi, lo)
        while True:
            jumped = parent[parent]
            if np.array_equal(jumped, parent):
                break
            parent = jumped
