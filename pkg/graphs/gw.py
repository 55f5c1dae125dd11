"""Galton-Watson trees, optionally conditioned to reach generation n."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from graphs.core import BadParameter, GeneratorError, Graph, Provenance
from seeding import StreamRole, stream

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 10**6
MAX_VERTICES = 5_000_000


class ImpossibleConditioning(GeneratorError):
    """Raised when survival is requested for a law with nu(0) = 1."""


class ConditioningExhausted(GeneratorError):
    """Raised when rejection sampling hits its attempt cap."""


class TreeTooLarge(GeneratorError):
    """Raised when a sampled tree exceeds the vertex guard."""


def offspring_moments(nu: dict[int, float]) -> tuple[float, float]:
    """Mean m and second moment sum k^2 nu(k)."""
    ks = np.array(sorted(nu), dtype=np.float64)
    ps = np.array([nu[k] for k in sorted(nu)], dtype=np.float64)
    return float((ks * ps).sum()), float((ks * ks * ps).sum())


def geometric_volume(m: float, n: int) -> float:
    """v_n = 1 + m + ... + m^n."""
    return float(sum(m ** k for k in range(n + 1)))


@dataclass
class GWRecord:
    nu: dict[int, float]
    m: float
    sigma2: float
    generations: list[int]          # Z_0..Z_n
    v_n: float
    tree: Graph                     # rooted at vertex 0, ids in generation order
    conditioning: str               # none | survival
    attempts: int = 1
    seed: int = 0

    @property
    def n(self) -> int:
        return len(self.generations) - 1

    @property
    def size(self) -> int:
        return self.tree.num_vertices

    @property
    def survived(self) -> bool:
        return self.generations[-1] > 0

    @property
    def w_proxy(self) -> float:
        """|G_n| / v_n."""
        return self.size / self.v_n

    @property
    def martingale(self) -> float:
        """Z_n / m^n."""
        return self.generations[-1] / self.m ** self.n


def _grow(ks: np.ndarray, ps: np.ndarray, n: int, rng: np.random.Generator,
          stop_on_extinction: bool, max_vertices: int) -> Optional[tuple[list[int], np.ndarray]]:
    generations = [1]
    parents: list[np.ndarray] = []
    current = np.zeros(1, dtype=np.int64)
    next_id = 1
    for _ in range(n):
        counts = rng.choice(ks, size=len(current), p=ps)
        total = int(counts.sum())
        generations.append(total)
        if total == 0:
            if stop_on_extinction:
                return None
            generations.extend([0] * (n + 1 - len(generations)))
            break
        if next_id + total > max_vertices:
            raise TreeTooLarge(f"tree exceeds {max_vertices} vertices at generation {len(generations) - 1}")
        parents.append(np.repeat(current, counts))
        current = np.arange(next_id, next_id + total, dtype=np.int64)
        next_id += total
    if parents:
        parent_of = np.concatenate(parents)
        edges = np.stack([parent_of, np.arange(1, next_id, dtype=np.int64)], axis=1)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return generations, edges


def gen_gw_tree(
    nu: dict[int, float],
    n: int,
    conditioning: str = "survival",
    seed: int = 0,
    max_attempts: int = MAX_ATTEMPTS,
    max_vertices: int = MAX_VERTICES,
) -> GWRecord:
    """Grow n generations; under ``survival`` resample until Z_n != 0.

    Attempts consume one graph stream in sequence, so the accepted tree is a
    function of the seed alone.

    Raises:
        ImpossibleConditioning: survival requested with nu(0) = 1.
        ConditioningExhausted: no surviving tree within ``max_attempts``.
        BadParameter: malformed law or conditioning.
    """
    if conditioning not in ("none", "survival"):
        raise BadParameter(f"conditioning must be none or survival, got {conditioning!r}")
    if n < 0:
        raise BadParameter(f"generation count must be >= 0, got {n}")
    if any(k < 0 for k in nu) or any(q < 0 for q in nu.values()) or abs(sum(nu.values()) - 1.0) > 1e-9:
        raise BadParameter(f"not a probability law on nonnegative integers: {nu}")
    m, sigma2 = offspring_moments(nu)
    if conditioning == "survival" and n > 0 and nu.get(0, 0.0) >= 1.0:
        raise ImpossibleConditioning("nu(0) = 1: no tree reaches generation 1")
    if m <= 1:
        logger.warning("subcritical or critical offspring law (m=%.4f); trees die out almost surely", m)

    ks = np.array(sorted(nu), dtype=np.int64)
    ps = np.array([nu[k] for k in sorted(nu)], dtype=np.float64)
    ps = ps / ps.sum()
    rng = stream(seed, role=StreamRole.GRAPH)
    stop = conditioning == "survival"

    for attempt in range(1, max_attempts + 1):
        grown = _grow(ks, ps, n, rng, stop, max_vertices)
        if grown is None:
            continue
        generations, edges = grown
        prov = Provenance.of("gw", seed, n, {"nu": ",".join(f"{k}:{nu[k]!r}" for k in sorted(nu)),
                                             "conditioning": conditioning})
        tree = Graph(sum(generations), edges, None, prov)
        return GWRecord(nu=dict(nu), m=m, sigma2=sigma2, generations=generations,
                        v_n=geometric_volume(m, n), tree=tree, conditioning=conditioning,
                        attempts=attempt, seed=seed)
    raise ConditioningExhausted(f"no tree survived to generation {n} in {max_attempts} attempts")


@dataclass
class GWLimitDiagnostics:
    n: int
    m: float
    volume_ratio: float             # m^n / v_n, tends to (m-1)/m
    volume_ratio_limit: float
    martingale_mean: float          # mean Z_n / m^n over the records
    w_proxy_mean: float             # mean |G_n| / v_n
    proxy_gap: float                # mean |Z_n/m^n - |G_n|/v_n|
    small_w_fraction: float         # surviving trees with Z_n/m^n below the threshold
    samples: int


def gw_limit_diagnostics(records: list[GWRecord], small_w: float = 0.05) -> GWLimitDiagnostics:
    """Empirical versions of the three generation-n limits of a supercritical tree."""
    if not records:
        raise BadParameter("no records")
    n, m = records[0].n, records[0].m
    if any(r.n != n or r.m != m for r in records):
        raise BadParameter("records must share the law and the generation count")
    mart = np.array([r.martingale for r in records])
    proxy = np.array([r.w_proxy for r in records])
    alive = np.array([r.survived for r in records])
    small = float(np.mean(mart[alive] < small_w)) if alive.any() else float("nan")
    return GWLimitDiagnostics(
        n=n,
        m=m,
        volume_ratio=m ** n / geometric_volume(m, n),
        volume_ratio_limit=(m - 1) / m,
        martingale_mean=float(mart.mean()),
        w_proxy_mean=float(proxy.mean()),
        proxy_gap=float(np.abs(mart - proxy).mean()),
        small_w_fraction=small,
        samples=len(records),
    )
