"""Uniform-grid spatial hash for close-pair search among points in R^d."""

from __future__ import annotations

import itertools

import numpy as np


class SpatialHash:
    """Buckets points into cubic cells of side ``cell``.

    Any pair closer than ``cell`` lies in the same or an adjacent cell, so a
    close-pair query only compares each cell with half of its 3^d
    neighbourhood.
    """

    def __init__(self, points: np.ndarray, cell: float) -> None:
        if cell <= 0:
            raise ValueError(f"cell width must be positive, got {cell}")
        self.points = np.asarray(points, dtype=np.float64)
        self.cell = float(cell)
        self.d = self.points.shape[1]
        self._cells: dict[tuple[int, ...], np.ndarray] = {}
        if len(self.points) == 0:
            return
        origin = self.points.min(axis=0)
        idx = np.floor((self.points - origin) / self.cell).astype(np.int64)
        order = np.lexsort(idx.T[::-1])
        sorted_idx = idx[order]
        breaks = np.flatnonzero(np.any(sorted_idx[1:] != sorted_idx[:-1], axis=1)) + 1
        for members in np.split(order, breaks):
            self._cells[tuple(idx[members[0]].tolist())] = np.sort(members)

    @property
    def num_cells(self) -> int:
        return len(self._cells)

    def _forward_offsets(self) -> list[tuple[int, ...]]:
        offsets = []
        for off in itertools.product((-1, 0, 1), repeat=self.d):
            nonzero = [o for o in off if o != 0]
            if nonzero and nonzero[0] > 0:
                offsets.append(off)
        return offsets

    def close_pairs(self, radius: float) -> np.ndarray:
        """All pairs ``(i, j)``, ``i < j``, at Euclidean distance strictly below ``radius``."""
        if radius > self.cell:
            raise ValueError(f"radius {radius} exceeds cell width {self.cell}")
        r2 = radius * radius
        pts = self.points
        offsets = self._forward_offsets()
        found: list[np.ndarray] = []
        for key, members in self._cells.items():
            a = pts[members]
            if len(members) > 1:
                diff = a[:, None, :] - a[None, :, :]
                i, j = np.nonzero(np.triu((diff * diff).sum(-1) < r2, k=1))
                if len(i):
                    found.append(np.stack([members[i], members[j]], axis=1))
            for off in offsets:
                other = self._cells.get(tuple(k + o for k, o in zip(key, off)))
                if other is None:
                    continue
                diff = a[:, None, :] - pts[other][None, :, :]
                i, j = np.nonzero((diff * diff).sum(-1) < r2)
                if len(i):
                    found.append(np.stack([members[i], other[j]], axis=1))
        if not found:
            return np.empty((0, 2), dtype=np.int64)
        pairs = np.concatenate(found)
        return np.sort(pairs, axis=1)
