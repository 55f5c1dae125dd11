"""Geometry of the sampled graphs: component census, uniqueness, crossings, density, MST degrees."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import minimum_spanning_tree

from config import ModelConfig
from estimators import InsufficientSamples
from graphs.core import (
    BoxSpec,
    Graph,
    NoEmbedding,
    NotConnected,
    box_restrict,
    box_vertices,
    component_labels,
    connected_components,
    maximal_component,
)
from graphs.registry import generate
from graphs.union_find import UnionFind
from seeding import derive_seed

logger = logging.getLogger(__name__)

CENSUS_FIELDS = ("seed", "n", "component_rank", "size", "diameter", "in_boundary_shell")


class StructureError(Exception):
    """Base class for structure-analysis errors."""


class BadEpsilon(StructureError):
    """Raised when epsilon is outside (0, 1)."""


class BadAnnulus(StructureError):
    """Raised when an annulus scale is below 4."""


def _check_epsilon(epsilon: float) -> None:
    if not 0 < epsilon < 1:
        raise BadEpsilon(f"epsilon must lie in (0, 1), got {epsilon}")


def _flavor(g: Graph) -> str:
    return "lattice" if g.is_lattice else "continuum"


def _map(fn: Callable[[Any], Any], tasks: list[Any], workers: int) -> list[Any]:
    if workers <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def shell_thickness(n: int, epsilon: float) -> int:
    return math.ceil(n ** epsilon)


def proof_scale(n: int, epsilon: float, d: int) -> int:
    """Default annulus scale max(4, floor(n^(eps/d) / 2))."""
    return max(4, int(math.floor(n ** (epsilon / d) / 2)))


# -- census ------------------------------------------------------------------

@dataclass(frozen=True)
class CensusRow:
    rank: int                   # 1 = largest; ties by smallest vertex id
    size: int
    diameter: float             # l-infinity
    in_boundary_shell: bool     # no vertex in B_{n - shell}


@dataclass
class CensusReport:
    n: int
    epsilon: float
    d: int
    shell: int
    rows: list[CensusRow]
    verdict_unique_giant: bool
    verdict_others: bool
    seed: int = 0

    @staticmethod
    def verdicts(rows: Sequence[CensusRow], n: int, d: int, epsilon: float) -> tuple[bool, bool]:
        giant_floor = n ** (d - epsilon)
        small_ceiling = n ** epsilon
        unique = sum(1 for r in rows if r.size > giant_floor) == 1
        others = all(r.size < small_ceiling or r.in_boundary_shell for r in rows if r.rank > 1)
        return unique, others

    def recompute(self) -> tuple[bool, bool]:
        return self.verdicts(self.rows, self.n, self.d, self.epsilon)

    def csv_rows(self) -> list[dict[str, Any]]:
        return [
            {"seed": self.seed, "n": self.n, "component_rank": r.rank, "size": r.size,
             "diameter": repr(float(r.diameter)), "in_boundary_shell": int(r.in_boundary_shell)}
            for r in self.rows
        ]


def component_census(g: Graph, n: int, epsilon: float, seed: int = 0) -> CensusReport:
    """Census of the components of a box restriction at scale ``n``.

    Raises:
        BadEpsilon: unless ``0 < epsilon < 1``.
        NoEmbedding: if ``g`` has no coordinates.
    """
    _check_epsilon(epsilon)
    if g.coords is None:
        raise NoEmbedding(f"{g!r} has no embedding")
    d = g.dim
    t = shell_thickness(n, epsilon)
    comps = sorted(connected_components(g), key=lambda c: (-c.size, c.min_vertex))
    if n - t >= 1:
        inner = BoxSpec(n - t, d, _flavor(g)).contains(g.coords) if g.num_vertices else np.zeros(0, dtype=bool)
    else:
        inner = np.zeros(g.num_vertices, dtype=bool)
    rows = [
        CensusRow(rank, c.size, c.metric_diameter, not bool(inner[c.vertices].any()))
        for rank, c in enumerate(comps, start=1)
    ]
    unique, others = CensusReport.verdicts(rows, n, d, epsilon)
    return CensusReport(n, epsilon, d, t, rows, unique, others, seed)


def _census_task(args: tuple[ModelConfig, int, int, float]) -> CensusReport:
    model, n, seed, epsilon = args
    g = generate(model, n, seed)
    return component_census(g, n, epsilon, seed)


def census_over_seeds(model: ModelConfig, n: int, seeds: int, epsilon: float,
                      master_seed: int = 0, workers: int = 1) -> list[CensusReport]:
    """One census per seed index, returned in seed order."""
    tasks = [(model, n, derive_seed(master_seed, n, s), epsilon) for s in range(seeds)]
    return _map(_census_task, tasks, workers)


def census_summary(reports: Sequence[CensusReport]) -> dict[str, Any]:
    if not reports:
        return {"samples": 0}
    unique = [r.verdict_unique_giant for r in reports]
    others = [r.verdict_others for r in reports]
    both = [a and b for a, b in zip(unique, others)]
    return {
        "samples": len(reports),
        "n": reports[0].n,
        "epsilon": reports[0].epsilon,
        "shell": reports[0].shell,
        "unique_giant_fraction": float(np.mean(unique)),
        "others_fraction": float(np.mean(others)),
        "both_fraction": float(np.mean(both)),
    }


def write_census_csv(path: str, reports: Iterable[CensusReport]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CENSUS_FIELDS, lineterminator="\n")
        writer.writeheader()
        for report in reports:
            writer.writerows(report.csv_rows())


# -- uniqueness and crossings ------------------------------------------------

def uniqueness_event(model: ModelConfig, n: int, seed: int) -> bool:
    """Whether every component of G on B_n with diameter > n/10 is joined inside B_2n.

    Raises:
        NoEmbedding: for models without coordinates.
    """
    if model.model == "gw":
        raise NoEmbedding("Galton-Watson trees carry no embedding")
    g2 = generate(model, 2 * n, seed)
    inner = BoxSpec(n, g2.dim, _flavor(g2))
    parent_ids = box_vertices(g2, inner)
    gn = box_restrict(g2, inner)
    labels = component_labels(g2)
    roots = {
        int(labels[parent_ids[c.min_vertex]])
        for c in connected_components(gn)
        if c.metric_diameter > n / 10
    }
    return len(roots) <= 1


@dataclass(frozen=True)
class AnnulusSpec:
    """x + (B_l minus B_{floor(l/4)}), with the region read off x + B_{l+1}."""
    center: tuple[float, ...]
    scale: int

    def __post_init__(self) -> None:
        if self.scale < 4:
            raise BadAnnulus(f"annulus scale must be >= 4, got {self.scale}")

    @property
    def inner_scale(self) -> int:
        return self.scale // 4


def annulus_crossing_components(g: Graph, spec: AnnulusSpec) -> int:
    """Components of g on x + B_{l+1} meeting both x + B_{l/4} and the complement of x + B_l.

    Raises:
        NoEmbedding: if ``g`` has no coordinates.
    """
    if g.coords is None:
        raise NoEmbedding(f"{g!r} has no embedding")
    if g.num_vertices == 0:
        return 0
    flavor = _flavor(g)
    d = g.dim
    center = np.asarray(spec.center, dtype=g.coords.dtype)
    region = box_restrict(g, BoxSpec(spec.scale + 1, d, flavor), center)
    if region.num_vertices == 0:
        return 0
    near = BoxSpec(spec.inner_scale, d, flavor).contains(region.coords, center)
    far = ~BoxSpec(spec.scale, d, flavor).contains(region.coords, center)
    labels = component_labels(region)
    return len(set(labels[near].tolist()) & set(labels[far].tolist()))


# -- density -----------------------------------------------------------------

@dataclass
class DensityRow:
    n: int
    mean: float
    variance: float
    count: int
    samples: list[tuple[int, int]] = field(default_factory=list, repr=False)   # (|G_n|, |B_n|)


def _density_task(args: tuple[ModelConfig, int, int]) -> tuple[int, int]:
    model, n, seed = args
    g = generate(model, n, seed)
    size = maximal_component(g).size if g.num_vertices else 0
    return size, BoxSpec(n, model.d).size


def density_series(model: ModelConfig, n_list: Sequence[int], seeds: int,
                   master_seed: int = 0, workers: int = 1) -> list[DensityRow]:
    """Mean and variance of |G_n|/|B_n| per scale.

    Raises:
        InsufficientSamples: with fewer than two seeds per scale.
    """
    if seeds < 2:
        raise InsufficientSamples(f"density needs >= 2 seeds per scale, got {seeds}")
    tasks = [(model, n, derive_seed(master_seed, n, s)) for n in n_list for s in range(seeds)]
    results = _map(_density_task, tasks, workers)
    rows = []
    for i, n in enumerate(n_list):
        chunk = results[i * seeds:(i + 1) * seeds]
        ratios = np.array([a / b for a, b in chunk])
        rows.append(DensityRow(n, float(ratios.mean()), float(ratios.var(ddof=1)), seeds, list(chunk)))
    return rows


@dataclass
class ClusterProxyReport:
    n: int
    maximal_size: int               # maximal component of G on B_n
    large_part_size: int            # maximal component of G on B_2n, cut to B_n
    symmetric_difference: int
    shell_size: int                 # |B_n| - |B_{n - shell}|
    holds: bool


def infinite_cluster_proxy(g_2n: Graph, n: int, epsilon: float) -> ClusterProxyReport:
    """Compare the maximal component on B_n with the trace of the one on B_2n.

    The two agree up to the boundary shell whenever the largest cluster at
    scale 2n is the one that crosses B_n.
    """
    _check_epsilon(epsilon)
    d = g_2n.dim
    box = BoxSpec(n, d, _flavor(g_2n))
    parent_ids = box_vertices(g_2n, box)
    gn = box_restrict(g_2n, box)
    local = set(parent_ids[maximal_component(gn).vertices].tolist()) if gn.num_vertices else set()
    big = maximal_component(g_2n).vertices if g_2n.num_vertices else np.empty(0, dtype=np.int64)
    trace = set(np.intersect1d(big, parent_ids).tolist())
    t = shell_thickness(n, epsilon)
    shell_size = box.size - (BoxSpec(n - t, d).size if n - t >= 1 else 0)
    diff = len(local ^ trace)
    return ClusterProxyReport(n, len(local), len(trace), diff, shell_size, diff <= shell_size)


# -- random geometric graphs -------------------------------------------------

def _edge_lengths(g: Graph) -> np.ndarray:
    e = g.edges
    return np.linalg.norm(g.coords[e[:, 0]] - g.coords[e[:, 1]], axis=1)


def mst_degree_check(g: Graph) -> tuple[int, Graph]:
    """Maximum degree of the Euclidean minimum spanning tree, and the tree.

    Kruskal over edges sorted by (length, u, v), which makes equal lengths
    deterministic.

    Raises:
        NotConnected: if ``g`` is not connected.
        NoEmbedding: if ``g`` has no coordinates.
    """
    if g.coords is None:
        raise NoEmbedding(f"{g!r} has no embedding")
    if g.num_vertices == 0:
        raise NotConnected("empty graph has no spanning tree")
    e = g.edges
    lengths = _edge_lengths(g)
    order = np.lexsort((e[:, 1], e[:, 0], lengths))
    uf = UnionFind(g.num_vertices)
    chosen = [i for i in order.tolist() if uf.union(int(e[i, 0]), int(e[i, 1]))]
    if uf.num_sets != 1:
        raise NotConnected(f"graph has {uf.num_sets} components")
    tree = Graph(g.num_vertices, e[chosen].reshape(-1, 2), g.coords, g.provenance)
    max_degree = int(tree.degrees.max()) if tree.num_edges else 0
    return max_degree, tree


def tree_length(tree: Graph) -> float:
    return float(_edge_lengths(tree).sum()) if tree.num_edges else 0.0


def scipy_mst_length(g: Graph) -> float:
    """Total MST length from scipy's csgraph, as an independent cross-check."""
    if g.num_edges == 0:
        return 0.0
    e = g.edges
    w = coo_matrix((_edge_lengths(g), (e[:, 0], e[:, 1])), shape=(g.num_vertices, g.num_vertices))
    return float(minimum_spanning_tree(w.tocsr()).sum())


@dataclass
class RGGComponentReport:
    n: int
    maximal_size: int
    maximal_diameter: float
    other_max_size: int
    other_max_diameter: float
    diameter_ok: bool           # maximal diameter > n
    others_ok: bool             # other diameters < (log n)^2 and sizes < eps n^d


def rgg_component_report(g: Graph, n: int, epsilon: float = 0.5) -> RGGComponentReport:
    _check_epsilon(epsilon)
    if g.coords is None:
        raise NoEmbedding(f"{g!r} has no embedding")
    comps = sorted(connected_components(g), key=lambda c: (-c.size, c.min_vertex))
    if not comps:
        return RGGComponentReport(n, 0, 0.0, 0, 0.0, False, True)
    top, rest = comps[0], comps[1:]
    other_size = max((c.size for c in rest), default=0)
    other_diam = max((c.metric_diameter for c in rest), default=0.0)
    d = g.dim
    others_ok = other_diam < math.log(n) ** 2 and other_size < epsilon * n ** d
    return RGGComponentReport(n, top.size, top.metric_diameter, other_size, other_diam,
                              top.metric_diameter > n, others_ok)
