"""Independent trials, their aggregation and trial dumps."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from config import ContactConfig
from contact.simulator import BadRates, ContactError, TrialOutcome, run_trial
from graphs.core import EmptyGraph, Graph, is_connected

logger = logging.getLogger(__name__)

TRIAL_DUMP_FIELDS = ("trial_index", "tau", "censored", "events")


class AllCensored(ContactError):
    """Raised when every trial reached the time cap."""


@dataclass
class ExtinctionEstimate:
    mean: float
    std_error: float
    censored_count: int
    trials: int
    outcomes: list[TrialOutcome] = field(default_factory=list, repr=False)

    def __iter__(self) -> Iterator[float]:
        yield self.mean
        yield self.std_error
        yield self.censored_count

    @property
    def censored_fraction(self) -> float:
        return self.censored_count / self.trials

    def uncensored_taus(self) -> np.ndarray:
        return np.array([o.tau for o in self.outcomes if not o.censored])


def _run_chunk(args: tuple[Graph, ContactConfig, int, int, int]) -> list[TrialOutcome]:
    g, cfg, master_seed, start, stop = args
    return [run_trial(g, cfg, master_seed, i) for i in range(start, stop)]


def run_trials(g: Graph, cfg: ContactConfig, trials: int, master_seed: int,
               workers: int = 1, chunk: Optional[int] = None) -> list[TrialOutcome]:
    """Outcomes of trials ``0..trials-1`` in index order, whatever the worker count."""
    if workers <= 1 or trials < 2:
        return _run_chunk((g, cfg, master_seed, 0, trials))
    chunk = chunk or max(1, math.ceil(trials / (4 * workers)))
    tasks = [(g, cfg, master_seed, s, min(s + chunk, trials)) for s in range(0, trials, chunk)]
    outcomes: list[TrialOutcome] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_chunk, tasks):
            outcomes.extend(part)
    return outcomes


def summarize(outcomes: list[TrialOutcome]) -> ExtinctionEstimate:
    """Mean and standard error over uncensored trials.

    Raises:
        AllCensored: if no trial went extinct before the cap.
    """
    taus = np.array([o.tau for o in outcomes if not o.censored], dtype=np.float64)
    censored = len(outcomes) - len(taus)
    if len(taus) == 0:
        raise AllCensored(f"all {len(outcomes)} trials censored")
    se = float(taus.std(ddof=1) / math.sqrt(len(taus))) if len(taus) > 1 else float("nan")
    return ExtinctionEstimate(float(taus.mean()), se, censored, len(outcomes), outcomes)


def estimate_mean_extinction(g: Graph, cfg: ContactConfig, trials: int, master_seed: int,
                             workers: int = 1) -> ExtinctionEstimate:
    """Estimate E[tau_G] from ``trials`` independent runs.

    Trial i uses the streams of ``(master_seed, i)`` and the aggregate is
    taken in trial order, so the result does not depend on ``workers``.

    Raises:
        EmptyGraph, BadRates, AllCensored
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if g.num_vertices == 0:
        raise EmptyGraph("contact process on an empty graph")
    if cfg.lam < 0:
        raise BadRates(f"infection rate must be >= 0, got {cfg.lam}")
    if not is_connected(g):
        logger.warning("estimating extinction on a disconnected graph (%d vertices)", g.num_vertices)
    est = summarize(run_trials(g, cfg, trials, master_seed, workers))
    if est.censored_count:
        logger.info("%d of %d trials censored at t=%g", est.censored_count, trials, cfg.time_cap)
    return est


def write_trial_dump(path: str, outcomes: list[TrialOutcome]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRIAL_DUMP_FIELDS)
        for o in outcomes:
            writer.writerow([o.trial_index, repr(o.tau), int(o.censored), o.event_count])
