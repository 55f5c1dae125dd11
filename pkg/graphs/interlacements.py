"""Random interlacements at level u seen in B_n (d >= 3).

Trajectories enter B_n from its equilibrium measure and are followed until
they leave B_M. Their number is Poisson(u * cap(B_n)), realized as the
arrivals before time u of a rate-cap Poisson process, and trajectory i is
drawn from its own stream. Samples at levels u1 < u2 with the same seed
therefore share a trajectory prefix and occupied(u1) is a subset of
occupied(u2).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from graphs.core import BadDimension, BadParameter, BoxSpec, GeneratorError, Graph, Provenance, induced_subgraph
from graphs.lattice import in_lattice_box, lattice_coords, lattice_edges, site_index, unit_steps
from graphs.potential import escape_by_solve, escape_by_walks
from seeding import StreamRole, stream

logger = logging.getLogger(__name__)

WALK_CHUNK = 1024


class KillRadiusTooSmall(GeneratorError):
    """Raised when the kill radius is below 4n."""


@dataclass(frozen=True)
class EquilibriumMeasure:
    d: int
    n: int
    kill_radius: int
    sites: np.ndarray       # inner boundary of B_n
    escape: np.ndarray      # e(x) on those sites
    method: str

    @property
    def capacity(self) -> float:
        return float(self.escape.sum())

    def normalized(self) -> np.ndarray:
        return self.escape / self.escape.sum()


@lru_cache(maxsize=16)
def equilibrium_measure(d: int, n: int, kill_radius: int, walks: int = 256,
                        seed: int = 0, method: str = "walks") -> EquilibriumMeasure:
    """Killed equilibrium measure of B_n, by escape walks or by a harmonic solve."""
    if method == "walks":
        sites, escape = escape_by_walks(d, n, kill_radius, walks, seed)
    elif method == "solve":
        sites, escape = escape_by_solve(d, n, kill_radius)
    else:
        raise BadParameter(f"unknown capacity method {method!r}")
    if escape.sum() <= 0:
        raise GeneratorError(f"no escape observed from B_{n} (raise the walk count)")
    sites.setflags(write=False)
    escape.setflags(write=False)
    logger.debug("cap(B_%d) ~ %.4f in d=%d (M=%d, %s)", n, escape.sum(), d, kill_radius, method)
    return EquilibriumMeasure(d, n, kill_radius, sites, escape, method)


@dataclass
class InterlacementSample:
    u: float
    box: BoxSpec
    kill_radius: int
    num_trajectories: int
    occupied: np.ndarray        # mask over B_n sites in lattice order
    cap_estimate: float

    @property
    def vacant(self) -> np.ndarray:
        return ~self.occupied


def _check(box: BoxSpec, us: Sequence[float], kill_radius: int) -> None:
    if box.d < 3:
        raise BadDimension(f"interlacements need d >= 3, got d={box.d}")
    if box.flavor != "lattice":
        raise BadParameter("interlacements are defined on a lattice box")
    if any(u < 0 for u in us):
        raise BadParameter(f"intensity must be nonnegative, got {list(us)}")
    if kill_radius < 4 * box.n:
        raise KillRadiusTooSmall(f"kill radius {kill_radius} < 4n = {4 * box.n}")


def _trace(start: np.ndarray, n: int, M: int, rng: np.random.Generator) -> np.ndarray:
    """B_n site ids visited by a walk from ``start`` until it leaves B_M."""
    steps = unit_steps(len(start))
    visited = [site_index(start[None, :], n)]
    pos = start
    while True:
        path = pos + np.cumsum(steps[rng.integers(len(steps), size=WALK_CHUNK)], axis=0)
        stop = np.flatnonzero(~in_lattice_box(path, M))
        segment = path if len(stop) == 0 else path[:stop[0]]
        hits = segment[in_lattice_box(segment, n)]
        if len(hits):
            visited.append(site_index(hits, n))
        if len(stop):
            return np.unique(np.concatenate(visited))
        pos = path[-1]


def sample_interlacements_coupled(
    box: BoxSpec,
    us: Sequence[float],
    kill_radius: int,
    seed: int,
    walks: int = 256,
    cap_seed: int = 0,
    cap_method: str = "walks",
) -> list[InterlacementSample]:
    """One sample per level in ``us``, all from the same trajectory sequence."""
    _check(box, us, kill_radius)
    eq = equilibrium_measure(box.d, box.n, kill_radius, walks, cap_seed, cap_method)
    cap = eq.capacity
    start_law = eq.normalized()
    u_max = max(us) if len(us) else 0.0

    arrivals = stream(seed, 0, role=StreamRole.TRAJECTORIES)
    times: list[float] = []
    t = 0.0
    while True:
        t += arrivals.exponential(1.0 / cap)
        if t > u_max:
            break
        times.append(t)

    sites = (2 * box.n) ** box.d
    traces = []
    for i in range(len(times)):
        rng = stream(seed, i + 1, role=StreamRole.TRAJECTORIES)
        start = eq.sites[rng.choice(len(eq.sites), p=start_law)]
        traces.append(_trace(start, box.n, kill_radius, rng))

    samples = []
    for u in us:
        count = int(np.searchsorted(times, u, side="right"))
        occupied = np.zeros(sites, dtype=bool)
        for tr in traces[:count]:
            occupied[tr] = True
        samples.append(InterlacementSample(u, box, kill_radius, count, occupied, cap))
    return samples


def sample_interlacements(box: BoxSpec, u: float, kill_radius: int, seed: int,
                          walks: int = 256, cap_seed: int = 0, cap_method: str = "walks") -> InterlacementSample:
    return sample_interlacements_coupled(box, [u], kill_radius, seed, walks, cap_seed, cap_method)[0]


def gen_interlacements(box: BoxSpec, u: float, kill_radius: Optional[int], seed: int,
                       occupied: bool = True, walks: int = 256, cap_method: str = "walks") -> Graph:
    """Induced lattice graph on the occupied set (or on the vacant set)."""
    M = 4 * box.n if kill_radius is None else kill_radius
    sample = sample_interlacements(box, u, M, seed, walks=walks, cap_method=cap_method)
    coords = lattice_coords(box.n, box.d)
    model = "ri-occupied" if occupied else "ri-vacant"
    prov = Provenance.of(model, seed, box.n, {"d": box.d, "u": u, "kill_radius": M, "cap_walks": walks})
    full = Graph(len(coords), lattice_edges(box.n, box.d), coords, prov)
    mask = sample.occupied if occupied else sample.vacant
    return induced_subgraph(full, np.flatnonzero(mask))
