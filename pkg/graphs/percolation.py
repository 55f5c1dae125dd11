"""Bond and site percolation on the lattice box B_n."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from graphs.core import BadDimension, BadParameter, BoxSpec, Graph, Provenance, induced_subgraph
from graphs.lattice import lattice_coords, lattice_edges
from seeding import StreamRole, stream

logger = logging.getLogger(__name__)


@dataclass
class PercolationSample:
    kind: str               # bond | site
    p: float
    box: BoxSpec
    open_mask: np.ndarray   # over lattice edges (bond) or sites (site)
    graph: Graph

    @property
    def open_count(self) -> int:
        return int(self.open_mask.sum())


def _check(box: BoxSpec, p: float) -> None:
    if box.d < 2:
        raise BadDimension(f"percolation needs d >= 2, got d={box.d}")
    if box.flavor != "lattice":
        raise BadParameter("percolation is defined on a lattice box")
    if not 0.0 <= p <= 1.0:
        raise BadParameter(f"open probability must lie in [0, 1], got {p}")


def sample_percolation(kind: str, box: BoxSpec, p: float, seed: int) -> PercolationSample:
    """Open every edge (bond) or site (site) of B_n independently with probability p."""
    _check(box, p)
    rng = stream(seed, role=StreamRole.GRAPH)
    coords = lattice_coords(box.n, box.d)
    edges = lattice_edges(box.n, box.d)
    prov = Provenance.of(kind, seed, box.n, {"d": box.d, "p": p})

    if kind == "bond":
        mask = rng.random(len(edges)) < p
        graph = Graph(len(coords), edges[mask], coords, prov)
    elif kind == "site":
        if box.d == 2:
            logger.warning("site percolation at d=2: uniqueness of the crossing cluster is not established there")
        mask = rng.random(len(coords)) < p
        full = Graph(len(coords), edges, coords, prov)
        graph = induced_subgraph(full, np.flatnonzero(mask))
    else:
        raise BadParameter(f"unknown percolation kind {kind!r}")
    return PercolationSample(kind, p, box, mask, graph)


def gen_bond_percolation(box: BoxSpec, p: float, seed: int) -> Graph:
    return sample_percolation("bond", box, p, seed).graph


def gen_site_percolation(box: BoxSpec, p: float, seed: int) -> Graph:
    return sample_percolation("site", box, p, seed).graph
