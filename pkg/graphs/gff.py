"""Gaussian free field excursion sets on B_n (d >= 3).

The covariance is the Green function of simple random walk killed on exiting
the padded box B_{pad*n}. It is computed once per (d, n, pad) with a sparse
LU solve, factorized by Cholesky and cached; each sample is then ``L @ z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from graphs.core import BadDimension, BadParameter, BoxSpec, Graph, Provenance, induced_subgraph
from graphs.lattice import lattice_coords, lattice_edges
from graphs.potential import TooLarge, killed_green_block
from seeding import StreamRole, stream

MAX_PADDED_SITES = 20_000


@dataclass
class GFFSample:
    box: BoxSpec
    pad_factor: int
    field: np.ndarray           # phi over B_n in lattice site order
    green_diag: np.ndarray      # g(x, x) over B_n
    h: float = float("-inf")

    def excursion_mask(self, h: float | None = None) -> np.ndarray:
        return self.field >= (self.h if h is None else h)


def _check(box: BoxSpec, pad_factor: int) -> None:
    if box.d < 3:
        raise BadDimension(f"free field needs d >= 3, got d={box.d}")
    if box.flavor != "lattice":
        raise BadParameter("free field is defined on a lattice box")
    if pad_factor < 2:
        raise BadParameter(f"pad factor must be >= 2, got {pad_factor}")
    sites = (2 * pad_factor * box.n) ** box.d
    if sites > MAX_PADDED_SITES:
        raise TooLarge(f"padded box B_{pad_factor * box.n} has {sites} sites (guard {MAX_PADDED_SITES})")


@lru_cache(maxsize=8)
def _factor(d: int, n: int, pad_factor: int) -> tuple[np.ndarray, np.ndarray]:
    cov = killed_green_block(d, n, pad_factor * n)
    chol = np.linalg.cholesky(cov)
    cov.setflags(write=False)
    chol.setflags(write=False)
    return cov, chol


def gff_covariance(box: BoxSpec, pad_factor: int) -> np.ndarray:
    """Truncated Green function on B_n x B_n (read-only, cached)."""
    _check(box, pad_factor)
    return _factor(box.d, box.n, pad_factor)[0]


def sample_gff_field(box: BoxSpec, pad_factor: int, seed: int, h: float = float("-inf")) -> GFFSample:
    _check(box, pad_factor)
    cov, chol = _factor(box.d, box.n, pad_factor)
    z = stream(seed, role=StreamRole.GRAPH).standard_normal(chol.shape[0])
    return GFFSample(box, pad_factor, chol @ z, np.diag(cov).copy(), h)


def gen_gff_excursion(box: BoxSpec, h: float, pad_factor: int, seed: int) -> Graph:
    """Induced lattice subgraph on {x in B_n : phi_x >= h}."""
    sample = sample_gff_field(box, pad_factor, seed, h)
    coords = lattice_coords(box.n, box.d)
    prov = Provenance.of("gff", seed, box.n, {"d": box.d, "h": h, "pad_factor": pad_factor})
    full = Graph(len(coords), lattice_edges(box.n, box.d), coords, prov)
    return induced_subgraph(full, np.flatnonzero(sample.excursion_mask()))
