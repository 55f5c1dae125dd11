"""Finite graphs, boxes and components.

Vertices are dense integer ids ``0..N-1``. Edges are stored once as
``(u, v)`` pairs with ``u < v``, sorted; adjacency is derived lazily as CSR
arrays. An optional embedding gives every vertex a coordinate in Z^d (integer
array) or R^d (float array). Graphs are immutable after construction and
safe to share read-only across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Optional

import numpy as np

from graphs.union_find import label_components


class GraphError(Exception):
    """Base class for graph-core errors."""


class EmptyGraph(GraphError):
    """Raised when an operation needs at least one vertex."""


class UnknownVertex(GraphError):
    """Raised when a vertex id is not part of the graph."""


class NoEmbedding(GraphError):
    """Raised when coordinates are required but the graph has none."""


class BadDimension(GraphError):
    """Raised when a dimension is outside the supported range."""


class NotConnected(GraphError):
    """Raised when a connected graph is required."""


class MalformedGraph(GraphError):
    """Raised when edges contain loops, duplicates or out-of-range ids."""


class GeneratorError(GraphError):
    """Base class for random graph sampler errors."""


class BadParameter(GeneratorError):
    """Raised when a model parameter is outside its domain."""


@dataclass(frozen=True)
class Provenance:
    """Where a graph came from: generator, parameters, seed and scale."""
    model: str = "explicit"
    seed: int = 0
    n: int = 0
    params: tuple[tuple[str, str], ...] = ()

    @classmethod
    def of(cls, model: str, seed: int, n: int, params: Optional[dict[str, Any]] = None) -> "Provenance":
        items = tuple((str(k), str(v)) for k, v in (params or {}).items())
        return cls(model=model, seed=int(seed), n=int(n), params=items)

    def params_dict(self) -> dict[str, str]:
        return dict(self.params)


@dataclass(frozen=True)
class BoxSpec:
    """B_n: lattice sites {-n..n-1}^d or the continuum cube [-n, n]^d."""
    n: int
    d: int
    flavor: str = "lattice"     # lattice | continuum

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"box scale must be positive, got {self.n}")
        if self.d < 1:
            raise BadDimension(f"box dimension must be >= 1, got {self.d}")
        if self.flavor not in ("lattice", "continuum"):
            raise ValueError(f"unknown box flavor {self.flavor!r}")

    @property
    def size(self) -> int:
        """Number of lattice sites, or volume of the continuum cube."""
        return (2 * self.n) ** self.d

    def scaled(self, n: int) -> "BoxSpec":
        return BoxSpec(n, self.d, self.flavor)

    def contains(self, coords: np.ndarray, center: Optional[np.ndarray] = None) -> np.ndarray:
        """Boolean mask of rows of ``coords`` lying in ``center + B_n``."""
        pts = np.asarray(coords)
        if center is not None:
            pts = pts - np.asarray(center)
        if pts.ndim != 2 or pts.shape[1] != self.d:
            raise BadDimension(f"coordinates of dimension {pts.shape[-1]} do not match box dimension {self.d}")
        hi = self.n - 1 if self.flavor == "lattice" else self.n
        return np.all((pts >= -self.n) & (pts <= hi), axis=1)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Graph:
    """Undirected simple graph with optional embedding and provenance."""

    def __init__(
        self,
        num_vertices: int,
        edges: Iterable[Iterable[int]] | np.ndarray = (),
        coords: Optional[np.ndarray] = None,
        provenance: Optional[Provenance] = None,
    ) -> None:
        if num_vertices < 0:
            raise MalformedGraph(f"negative vertex count {num_vertices}")
        e = np.asarray(edges, dtype=np.int64)
        if e.size == 0:
            e = np.empty((0, 2), dtype=np.int64)
        if e.ndim != 2 or e.shape[1] != 2:
            raise MalformedGraph(f"edges must be pairs, got shape {e.shape}")
        if len(e):
            if e.min() < 0 or e.max() >= num_vertices:
                raise MalformedGraph("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise MalformedGraph("self-loop")
            e = np.sort(e, axis=1)
            e = e[np.lexsort((e[:, 1], e[:, 0]))]
            if np.any(np.all(e[1:] == e[:-1], axis=1)):
                raise MalformedGraph("duplicate edge")

        if coords is not None:
            c = np.asarray(coords)
            if c.ndim != 2 or c.shape[0] != num_vertices or c.shape[1] < 1:
                raise MalformedGraph(f"embedding shape {c.shape} does not match {num_vertices} vertices")
            if not (np.issubdtype(c.dtype, np.integer) or np.issubdtype(c.dtype, np.floating)):
                raise MalformedGraph(f"unsupported coordinate dtype {c.dtype}")
            c = c.astype(np.int64 if np.issubdtype(c.dtype, np.integer) else np.float64, copy=True)
            coords = _freeze(c)

        self._n = int(num_vertices)
        self._edges = _freeze(np.ascontiguousarray(e))
        self._coords = coords
        self._provenance = provenance or Provenance()
        self._indptr: Optional[np.ndarray] = None
        self._indices: Optional[np.ndarray] = None
        self._adjacency: Optional[list[list[int]]] = None

    # -- basic accessors -----------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return self._n

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> np.ndarray:
        return self._edges

    @property
    def coords(self) -> Optional[np.ndarray]:
        return self._coords

    @property
    def dim(self) -> int:
        return 0 if self._coords is None else int(self._coords.shape[1])

    @property
    def is_lattice(self) -> bool:
        return self._coords is not None and np.issubdtype(self._coords.dtype, np.integer)

    @property
    def provenance(self) -> Provenance:
        return self._provenance

    def __len__(self) -> int:
        return self._n

    def __repr__(self) -> str:
        return (f"Graph(|V|={self._n}, |E|={self.num_edges}, d={self.dim}, "
                f"model={self._provenance.model!r}, seed={self._provenance.seed})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        if self._n != other._n or not np.array_equal(self._edges, other._edges):
            return False
        if (self._coords is None) != (other._coords is None):
            return False
        if self._coords is not None:
            if self._coords.dtype != other._coords.dtype or not np.array_equal(self._coords, other._coords):
                return False
        return self._provenance == other._provenance

    __hash__ = None  # type: ignore[assignment]

    # -- adjacency -----------------------------------------------------------

    def _build_csr(self) -> None:
        src = np.concatenate([self._edges[:, 0], self._edges[:, 1]])
        dst = np.concatenate([self._edges[:, 1], self._edges[:, 0]])
        order = np.lexsort((dst, src))
        counts = np.bincount(src, minlength=self._n)
        indptr = np.zeros(self._n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        self._indptr = _freeze(indptr)
        self._indices = _freeze(dst[order])

    @property
    def indptr(self) -> np.ndarray:
        if self._indptr is None:
            self._build_csr()
        return self._indptr

    @property
    def indices(self) -> np.ndarray:
        if self._indices is None:
            self._build_csr()
        return self._indices

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        if not 0 <= v < self._n:
            raise UnknownVertex(f"vertex {v} not in graph of {self._n} vertices")
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def adjacency_lists(self) -> list[list[int]]:
        """Neighbor lists as plain Python lists (for per-event loops)."""
        if self._adjacency is None:
            indptr, indices = self.indptr.tolist(), self.indices.tolist()
            self._adjacency = [indices[indptr[v]:indptr[v + 1]] for v in range(self._n)]
        return self._adjacency


@dataclass(eq=False)
class Component:
    """Connected vertex subset of a parent graph (sorted parent ids)."""
    graph: Graph
    vertices: np.ndarray

    @property
    def size(self) -> int:
        return int(len(self.vertices))

    @property
    def min_vertex(self) -> int:
        return int(self.vertices[0])

    @cached_property
    def metric_diameter(self) -> float:
        return metric_diameter(self.graph, self.vertices)[0]

    def subgraph(self) -> Graph:
        return induced_subgraph(self.graph, self.vertices)


# -- operations --------------------------------------------------------------

def connected_components(g: Graph) -> list[Component]:
    """All components, ordered by smallest vertex id."""
    if g.num_vertices == 0:
        return []
    labels = label_components(g.num_vertices, g.edges)
    order = np.argsort(labels, kind="stable")
    _, counts = np.unique(labels, return_counts=True)
    groups = np.split(order, np.cumsum(counts)[:-1])
    return [Component(g, _freeze(grp)) for grp in groups]


def component_labels(g: Graph) -> np.ndarray:
    """Per-vertex component label (the component's smallest vertex id)."""
    return label_components(g.num_vertices, g.edges)


def maximal_component(g: Graph) -> Component:
    """Largest component; ties go to the one with the smallest vertex id.

    Raises:
        EmptyGraph: if ``g`` has no vertices.
    """
    if g.num_vertices == 0:
        raise EmptyGraph("maximal component of an empty graph")
    labels = label_components(g.num_vertices, g.edges)
    roots, counts = np.unique(labels, return_counts=True)
    root = roots[int(np.argmax(counts))]
    return Component(g, _freeze(np.flatnonzero(labels == root)))


def is_connected(g: Graph) -> bool:
    if g.num_vertices == 0:
        return False
    return bool(np.all(label_components(g.num_vertices, g.edges) == 0))


def induced_subgraph(g: Graph, vs: Iterable[int] | np.ndarray) -> Graph:
    """Subgraph on ``vs``, relabelled ``0..k-1`` in increasing parent-id order.

    Raises:
        UnknownVertex: if some id in ``vs`` is not a vertex of ``g``.
    """
    keep = np.unique(np.asarray(vs if isinstance(vs, np.ndarray) else list(vs), dtype=np.int64))
    if len(keep) and (keep[0] < 0 or keep[-1] >= g.num_vertices):
        bad = keep[(keep < 0) | (keep >= g.num_vertices)][0]
        raise UnknownVertex(f"vertex {int(bad)} not in graph of {g.num_vertices} vertices")
    new_id = np.full(g.num_vertices, -1, dtype=np.int64)
    new_id[keep] = np.arange(len(keep), dtype=np.int64)
    e = g.edges
    mask = (new_id[e[:, 0]] >= 0) & (new_id[e[:, 1]] >= 0)
    coords = None if g.coords is None else g.coords[keep]
    return Graph(len(keep), new_id[e[mask]], coords, g.provenance)


def box_vertices(g: Graph, box: BoxSpec, center: Optional[np.ndarray] = None) -> np.ndarray:
    """Ids of vertices whose coordinates lie in ``center + box``.

    Raises:
        NoEmbedding: if ``g`` has no coordinates.
    """
    if g.coords is None:
        raise NoEmbedding(f"{g!r} has no embedding")
    if g.num_vertices == 0:
        return np.empty(0, dtype=np.int64)
    return np.flatnonzero(box.contains(g.coords, center))


def box_restrict(g: Graph, box: BoxSpec, center: Optional[np.ndarray] = None) -> Graph:
    """Induced subgraph on the vertices inside ``center + box``."""
    return induced_subgraph(g, box_vertices(g, box, center))


def metric_diameter(g: Graph, vs: Optional[np.ndarray] = None) -> tuple[float, bool]:
    """l-infinity diameter of the embedded vertex set and an exactness flag.

    The largest l-infinity distance over pairs equals the largest per-axis
    coordinate spread, so the value is always exact.
    """
    if g.coords is None:
        raise NoEmbedding(f"{g!r} has no embedding")
    pts = g.coords if vs is None else g.coords[np.asarray(vs, dtype=np.int64)]
    if len(pts) == 0:
        return 0.0, True
    spread = pts.max(axis=0) - pts.min(axis=0)
    return float(spread.max()), True
