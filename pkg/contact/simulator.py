"""Event-driven contact process with monotone coupling.

One graphical representation drives every coupled process: recovery clocks
of rate 1 per vertex and transmission clocks of rate ``lam_max`` per directed
edge, each transmission mark carrying a uniform label. A process with rate
``lam`` accepts a mark iff ``label < lam / lam_max``, and a process living on
an induced subgraph ignores marks that leave it. Every coupled process stays
inside the dominating one (largest rate, whole graph), so only clocks rooted
at the dominating infected set are ever realized.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.stats import kstest

from config import ContactConfig
from graphs.core import EmptyGraph, Graph, UnknownVertex, is_connected
from seeding import StreamRole, UniformBuffer, stream

logger = logging.getLogger(__name__)


class ContactError(Exception):
    """Base class for contact-process errors."""


class BadRates(ContactError):
    """Raised when infection rates are negative or not strictly ascending."""


@dataclass(frozen=True)
class TrialOutcome:
    tau: float              # extinction time, or the cap when censored
    censored: bool
    event_count: int        # state changes of this process
    master_seed: int
    trial_index: int

    @property
    def seed_path(self) -> tuple[int, int]:
        return self.master_seed, self.trial_index


@dataclass
class _Process:
    threshold: float                    # acceptance level lam / lam_max
    allowed: Optional[bytearray]        # vertex mask, None for the whole graph
    infected: bytearray
    count: int
    events: int = 0
    tau: Optional[float] = None


@dataclass
class GraphicalRepresentation:
    """Lazily realized Poisson clocks of one trial.

    Holding times come from the CLOCKS stream and event choices and labels
    from the MARKS stream of ``(master_seed, trial_index)``. With
    ``record=True`` the realized events are kept as
    ``(time, kind, x, y, label)`` tuples.
    """
    graph: Graph
    lam_max: float
    master_seed: int
    trial_index: int = 0
    record: bool = False
    events: list[tuple[float, str, int, int, float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._clocks = UniformBuffer(stream(self.master_seed, self.trial_index, role=StreamRole.CLOCKS))
        self._marks = UniformBuffer(stream(self.master_seed, self.trial_index, role=StreamRole.MARKS))

    def run(self, processes: list[_Process], time_cap: Optional[float]) -> None:
        """Advance until every process dies out or the cap is reached.

        The last process must dominate the others: largest rate, no mask,
        infected set containing theirs.
        """
        adj = self.graph.adjacency_lists()
        deg = [len(a) for a in adj]
        max_deg = max(deg) if deg else 0
        lam_max = self.lam_max
        clocks, marks = self._clocks, self._marks
        dom = processes[-1]
        dom_inf = dom.infected
        others = processes[:-1]

        active = [v for v in range(len(dom_inf)) if dom_inf[v]]
        pos = [-1] * len(dom_inf)
        for i, v in enumerate(active):
            pos[v] = i
        out_edges = sum(deg[v] for v in active)
        t = 0.0

        while active:
            rate = len(active) + lam_max * out_edges
            t -= math.log(clocks.next_positive()) / rate
            if time_cap is not None and t >= time_cap:
                break
            pick = marks.next() * rate
            if pick < len(active):
                x = active[int(pick)]
                if self.record:
                    self.events.append((t, "recover", x, x, 0.0))
                for proc in others:
                    if proc.count and proc.infected[x]:
                        proc.infected[x] = 0
                        proc.count -= 1
                        proc.events += 1
                        if proc.count == 0:
                            proc.tau = t
                dom_inf[x] = 0
                dom.count -= 1
                dom.events += 1
                last = active.pop()
                if last != x:
                    active[pos[x]] = last
                    pos[last] = pos[x]
                pos[x] = -1
                out_edges -= deg[x]
                continue

            # Transmission: source proportional to degree, then a uniform neighbour.
            while True:
                x = active[int(marks.next() * len(active))]
                if marks.next() * max_deg < deg[x]:
                    break
            nbrs = adj[x]
            y = nbrs[int(marks.next() * len(nbrs))]
            label = marks.next()
            if self.record:
                self.events.append((t, "transmit", x, y, label))
            for proc in others:
                if (proc.count and label < proc.threshold and proc.infected[x] and not proc.infected[y]
                        and (proc.allowed is None or proc.allowed[y])):
                    proc.infected[y] = 1
                    proc.count += 1
                    proc.events += 1
            if not dom_inf[y]:
                dom_inf[y] = 1
                dom.count += 1
                dom.events += 1
                pos[y] = len(active)
                active.append(y)
                out_edges += deg[y]

        if not active:
            dom.tau = t


def _initial_bytes(g: Graph, initial: Optional[Iterable[int]]) -> bytearray:
    if initial is None:
        return bytearray(b"\x01" * g.num_vertices)
    state = bytearray(g.num_vertices)
    for v in initial:
        if not 0 <= v < g.num_vertices:
            raise UnknownVertex(f"initial vertex {v} not in graph of {g.num_vertices} vertices")
        state[v] = 1
    if not any(state):
        raise ContactError("initial infected set is empty")
    return state


def _outcomes(processes: list[_Process], time_cap: Optional[float], master_seed: int,
              trial_index: int) -> list[TrialOutcome]:
    out = []
    for proc in processes:
        if proc.tau is None:
            out.append(TrialOutcome(float(time_cap), True, proc.events, master_seed, trial_index))
        else:
            out.append(TrialOutcome(proc.tau, False, proc.events, master_seed, trial_index))
    return out


def run_trial(g: Graph, cfg: ContactConfig, master_seed: int, trial_index: int = 0) -> TrialOutcome:
    """One trial without input checks (the per-trial body of the estimators)."""
    proc = _Process(1.0, None, _initial_bytes(g, cfg.initial), 0)
    proc.count = sum(proc.infected)
    rep = GraphicalRepresentation(g, cfg.lam, master_seed, trial_index)
    rep.run([proc], cfg.time_cap)
    return _outcomes([proc], cfg.time_cap, master_seed, trial_index)[0]


def simulate_extinction(g: Graph, cfg: ContactConfig, seed: int, trial_index: int = 0) -> TrialOutcome:
    """Sample tau_G from the configured initial state.

    Censored outcomes carry ``tau = time_cap``.

    Raises:
        EmptyGraph: if ``g`` has no vertices.
        BadRates: if the infection rate is negative.
    """
    if g.num_vertices == 0:
        raise EmptyGraph("contact process on an empty graph")
    if cfg.lam < 0:
        raise BadRates(f"infection rate must be >= 0, got {cfg.lam}")
    if not is_connected(g):
        logger.warning("contact process on a disconnected graph (%d vertices)", g.num_vertices)
    return run_trial(g, cfg, seed, trial_index)


def coupled_simulate(g: Graph, lambdas: Sequence[float], seed: int, time_cap: Optional[float] = 1e6,
                     trial_index: int = 0, initial: Optional[Iterable[int]] = None) -> list[TrialOutcome]:
    """Extinction times for every rate in ``lambdas`` on one realization.

    The returned times are nondecreasing in the rate on every realization.

    Raises:
        BadRates: unless ``lambdas`` is strictly ascending and positive.
    """
    if g.num_vertices == 0:
        raise EmptyGraph("contact process on an empty graph")
    lams = [float(x) for x in lambdas]
    if not lams or lams[0] <= 0 or any(a >= b for a, b in zip(lams, lams[1:])):
        raise BadRates(f"rates must be positive and strictly ascending, got {lams}")
    start = _initial_bytes(g, initial)
    lam_max = lams[-1]
    processes = [_Process(lam / lam_max, None, bytearray(start), sum(start)) for lam in lams]
    GraphicalRepresentation(g, lam_max, seed, trial_index).run(processes, time_cap)
    return _outcomes(processes, time_cap, seed, trial_index)


def coupled_subgraph_simulate(g: Graph, vs: Iterable[int], lam: float, seed: int,
                              time_cap: Optional[float] = 1e6,
                              trial_index: int = 0) -> tuple[TrialOutcome, TrialOutcome]:
    """(tau on the subgraph induced by ``vs``, tau on ``g``) from one realization.

    The subgraph process sees exactly the marks between its own vertices, so
    its extinction time never exceeds that of the whole graph.
    """
    if g.num_vertices == 0:
        raise EmptyGraph("contact process on an empty graph")
    if lam <= 0:
        raise BadRates(f"infection rate must be positive, got {lam}")
    mask = bytearray(g.num_vertices)
    for v in vs:
        if not 0 <= v < g.num_vertices:
            raise UnknownVertex(f"vertex {v} not in graph of {g.num_vertices} vertices")
        mask[v] = 1
    if not any(mask):
        raise EmptyGraph("empty subgraph")
    sub = _Process(1.0, mask, bytearray(mask), sum(mask))
    full = _Process(1.0, None, bytearray(b"\x01" * g.num_vertices), g.num_vertices)
    GraphicalRepresentation(g, lam, seed, trial_index).run([sub, full], time_cap)
    a, b = _outcomes([sub, full], time_cap, seed, trial_index)
    return a, b


def ks_exponential_distance(taus: Sequence[float]) -> float:
    """Kolmogorov-Smirnov distance between the sample and Exponential(1)."""
    return float(kstest(np.asarray(taus, dtype=np.float64), "expon").statistic)
