"""Random geometric graph on a Poisson process of intensity one."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from graphs.core import BadDimension, BadParameter, BoxSpec, Graph, Provenance
from graphs.spatial_hash import SpatialHash
from seeding import StreamRole, stream


@dataclass
class RGGSample:
    box: BoxSpec
    R: float
    points: np.ndarray
    graph: Graph


def sample_rgg(box: BoxSpec, R: float, seed: int) -> RGGSample:
    """Poisson((2n)^d) uniform points in [-n, n]^d, joined when closer than R.

    The point count comes from ``Generator.poisson`` on the graph stream,
    followed by the coordinates in generation order.
    """
    if box.d < 2:
        raise BadDimension(f"random geometric graph needs d >= 2, got d={box.d}")
    if R <= 0:
        raise BadParameter(f"radius must be positive, got {R}")
    if box.flavor != "continuum":
        box = BoxSpec(box.n, box.d, "continuum")
    rng = stream(seed, role=StreamRole.GRAPH)
    count = int(rng.poisson(box.size))
    points = rng.uniform(-box.n, box.n, size=(count, box.d))
    pairs = SpatialHash(points, R).close_pairs(R)
    prov = Provenance.of("rgg", seed, box.n, {"d": box.d, "R": R})
    return RGGSample(box, R, points, Graph(count, pairs, points, prov))


def gen_rgg(box: BoxSpec, R: float, seed: int) -> Graph:
    return sample_rgg(box, R, seed).graph


def brute_force_pairs(points: np.ndarray, R: float) -> np.ndarray:
    """O(points^2) reference for the close-pair relation."""
    pts = np.asarray(points, dtype=np.float64)
    diff = pts[:, None, :] - pts[None, :, :]
    i, j = np.nonzero(np.triu((diff * diff).sum(-1) < R * R, k=1))
    return np.stack([i, j], axis=1).astype(np.int64)
