"""Nearest-neighbour lattice boxes {-n..n-1}^d in lexicographic site order."""

from __future__ import annotations

import numpy as np


def lattice_coords(n: int, d: int) -> np.ndarray:
    """Site coordinates of B_n, first axis most significant."""
    side = np.arange(-n, n, dtype=np.int64)
    grids = np.meshgrid(*([side] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def lattice_edges(n: int, d: int) -> np.ndarray:
    """Nearest-neighbour edges inside B_n, axis by axis, in site order."""
    ids = np.arange((2 * n) ** d, dtype=np.int64).reshape((2 * n,) * d)
    blocks = []
    for axis in range(d):
        lo = np.take(ids, np.arange(0, 2 * n - 1), axis=axis).ravel()
        hi = np.take(ids, np.arange(1, 2 * n), axis=axis).ravel()
        blocks.append(np.stack([lo, hi], axis=1))
    if not blocks:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(blocks)


def num_lattice_edges(n: int, d: int) -> int:
    side = 2 * n
    return d * (side - 1) * side ** (d - 1)


def site_index(coords: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`lattice_coords` for rows inside B_n."""
    shifted = np.asarray(coords, dtype=np.int64) + n
    d = shifted.shape[-1]
    return np.ravel_multi_index(tuple(shifted[..., i] for i in range(d)), (2 * n,) * d)


def in_lattice_box(coords: np.ndarray, n: int) -> np.ndarray:
    c = np.asarray(coords)
    return np.all((c >= -n) & (c <= n - 1), axis=-1)


def unit_steps(d: int) -> np.ndarray:
    """The 2d nearest-neighbour steps +e_i, -e_i."""
    eye = np.eye(d, dtype=np.int64)
    return np.concatenate([eye, -eye])


def inner_boundary(n: int, d: int) -> np.ndarray:
    """Sites of B_n with at least one neighbour outside B_n."""
    coords = lattice_coords(n, d)
    on_edge = np.any((coords == -n) | (coords == n - 1), axis=1)
    return coords[on_edge]
