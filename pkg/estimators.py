"""Normalized extinction statistics, rate constants and inequality checks."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Iterator, Optional, Sequence

import numpy as np

from config import ContactConfig
from contact.exact import exact_expected_extinction
from contact.simulator import coupled_subgraph_simulate
from contact.trials import run_trials
from graphs.core import Graph, NotConnected, induced_subgraph, is_connected
from graphs.gw import GWRecord
from seeding import StreamRole, stream

logger = logging.getLogger(__name__)

Z95 = 1.959963984540054
USABLE_CENSORING = 0.5          # records censored at this fraction or more are unusable
DELTA_METHOD_LIMIT = 0.3        # se/mean below this -> delta-method CI, else bootstrap
BOOTSTRAP_RESAMPLES = 1000
EXACT_LIMIT = 14                # vertex count up to which checks use the exact solver

RESULT_FIELDS = ("model", "params", "n", "graph_size", "box_size", "mean_tau", "se",
                 "log_mean", "X", "X_box", "censored_frac", "seed")


class EstimatorError(Exception):
    """Base class for estimator errors."""


class NonpositiveMean(EstimatorError):
    """Raised when a mean extinction time is not positive."""


class InsufficientSamples(EstimatorError):
    """Raised when too few samples are available at the largest scale."""


class TooFewScales(EstimatorError):
    """Raised when a trend needs more scales than were given."""


class CensoringTooHigh(EstimatorError):
    """Raised when a scale has no record with acceptable censoring."""


class NotDisjoint(EstimatorError):
    """Raised when subgraphs share a vertex."""


class NotSubgraph(EstimatorError):
    """Raised when a subgraph uses a vertex outside the graph."""


# -- records -----------------------------------------------------------------

@dataclass(frozen=True)
class Normalization:
    """How a graph sample is scaled.

    ``kind`` is lattice, continuum or segment (box scale n^d) or gw (m^n).
    """
    kind: str
    n: int
    d: int = 1
    box_size: float = 0.0           # |B_n|, or v_n for trees
    m: Optional[float] = None
    z_n: Optional[int] = None
    conditioning: str = ""

    @classmethod
    def box(cls, n: int, d: int, flavor: str = "lattice") -> "Normalization":
        return cls(flavor, n, d, float((2 * n) ** d))

    @classmethod
    def segment(cls, n: int) -> "Normalization":
        return cls("segment", n, 1, float(n))

    @classmethod
    def tree(cls, record: GWRecord) -> "Normalization":
        return cls("gw", record.n, 0, record.v_n, record.m, record.generations[-1], record.conditioning)

    @property
    def scale(self) -> float:
        """n^d for boxes and segments, m^n for trees."""
        if self.kind == "gw":
            return float(self.m ** self.n)
        return float(self.n ** self.d)


@dataclass
class EstimateRecord:
    model: str
    params: str
    n: int
    graph_size: int
    box_size: float
    mean_tau: float
    se: float
    log_mean: float
    X: float                        # log_mean / |G_n|
    X_box: float                    # log_mean / n^d (log_mean / m^n for trees)
    ci: tuple[float, float]         # 95% interval on log_mean
    ci_method: str
    censored_frac: float = 0.0
    seed: int = 0
    scale: float = 1.0              # n^d, or m^n for trees

    @property
    def usable(self) -> bool:
        return self.censored_frac < USABLE_CENSORING

    def row(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "params": self.params,
            "n": self.n,
            "graph_size": self.graph_size,
            "box_size": _fmt(self.box_size),
            "mean_tau": _fmt(self.mean_tau),
            "se": _fmt(self.se),
            "log_mean": _fmt(self.log_mean),
            "X": _fmt(self.X),
            "X_box": _fmt(self.X_box),
            "censored_frac": _fmt(self.censored_frac),
            "seed": self.seed,
        }


@dataclass
class GWEstimateRecord(EstimateRecord):
    m: float = 0.0
    z_n: int = 0
    v_n: float = 0.0
    w_proxy: float = 0.0            # |G_n| / v_n
    Y: float = 0.0                  # log_mean / m^n
    conditioning: str = ""


def _fmt(x: float) -> str:
    return repr(float(x))


def _log_ci(mean_tau: float, se: float, samples: Optional[Sequence[float]], seed: int) -> tuple[tuple[float, float], str]:
    log_mean = math.log(mean_tau)
    if se is None or not math.isfinite(se):
        return (float("nan"), float("nan")), "none"
    rel = se / mean_tau
    if rel < DELTA_METHOD_LIMIT:
        return (log_mean - Z95 * rel, log_mean + Z95 * rel), "delta"
    if samples is None or len(samples) < 2:
        return (log_mean - Z95 * rel, log_mean + Z95 * rel), "delta-unreliable"
    data = np.asarray(samples, dtype=np.float64)
    rng = stream(seed, role=StreamRole.BOOTSTRAP)
    means = data[rng.integers(len(data), size=(BOOTSTRAP_RESAMPLES, len(data)))].mean(axis=1)
    lo, hi = np.percentile(np.log(means), [2.5, 97.5])
    return (float(lo), float(hi)), "bootstrap"


def compute_record(
    graph: Graph,
    mean_tau: float,
    se: float,
    normalization: Normalization,
    censored_frac: float = 0.0,
    samples: Optional[Sequence[float]] = None,
    seed: int = 0,
) -> EstimateRecord:
    """Fill every normalization of one extinction estimate.

    ``samples`` (the uncensored extinction times) are only needed for the
    bootstrap interval when ``se / mean_tau`` is large.

    Raises:
        NonpositiveMean: if ``mean_tau <= 0``.
    """
    if not mean_tau > 0:
        raise NonpositiveMean(f"mean extinction time must be positive, got {mean_tau}")
    log_mean = math.log(mean_tau)
    size = graph.num_vertices
    ci, method = _log_ci(mean_tau, se, samples, seed)
    prov = graph.provenance
    params = ";".join(f"{k}={v}" for k, v in prov.params)
    common = dict(
        model=prov.model,
        params=params,
        n=normalization.n,
        graph_size=size,
        box_size=normalization.box_size,
        mean_tau=float(mean_tau),
        se=float(se),
        log_mean=log_mean,
        X=log_mean / size if size else float("nan"),
        X_box=log_mean / normalization.scale,
        ci=ci,
        ci_method=method,
        censored_frac=float(censored_frac),
        seed=int(seed),
        scale=normalization.scale,
    )
    if normalization.kind != "gw":
        return EstimateRecord(**common)
    return GWEstimateRecord(
        **common,
        m=float(normalization.m),
        z_n=int(normalization.z_n or 0),
        v_n=normalization.box_size,
        w_proxy=size / normalization.box_size,
        Y=log_mean / normalization.scale,
        conditioning=normalization.conditioning,
    )


# -- density -----------------------------------------------------------------

@dataclass
class ThetaEstimate:
    theta: float
    se: float
    per_scale: list[dict[str, float]]   # box_size, mean, variance, count

    def __iter__(self) -> Iterator[float]:
        yield self.theta
        yield self.se


def estimate_theta(samples: Iterable[tuple[float, float]]) -> ThetaEstimate:
    """Mean and SE of |G_n|/|B_n| at the largest box.

    Raises:
        InsufficientSamples: fewer than two samples at the largest box.
    """
    groups: dict[float, list[float]] = {}
    for graph_size, box_size in samples:
        groups.setdefault(float(box_size), []).append(graph_size / box_size)
    if not groups:
        raise InsufficientSamples("no density samples")
    per_scale = []
    for box_size in sorted(groups):
        ratios = np.array(groups[box_size])
        per_scale.append({
            "box_size": box_size,
            "mean": float(ratios.mean()),
            "variance": float(ratios.var(ddof=1)) if len(ratios) > 1 else float("nan"),
            "count": len(ratios),
        })
    top = np.array(groups[max(groups)])
    if len(top) < 2:
        raise InsufficientSamples(f"need >= 2 samples at the largest box, got {len(top)}")
    return ThetaEstimate(float(top.mean()), float(top.std(ddof=1) / math.sqrt(len(top))), per_scale)


# -- rate trend --------------------------------------------------------------

@dataclass
class RateEstimate:
    family: str                         # lattice | gw
    gamma_tilde: float
    gamma_tilde_ci: tuple[float, float]
    theta: Optional[float]
    m: Optional[float]
    gamma: Optional[float]
    trend: list[dict[str, float]]       # n, mean, se, count
    increments: list[dict[str, float]]  # n_from, n_to, relative
    asymptote_not_reached: bool = True

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _relative_increment(a: float, b: float) -> float:
    if a == 0:
        return 0.0 if b == 0 else float("inf")
    return abs(b - a) / abs(a)


def gamma_trend(records: Sequence[EstimateRecord], theta: Optional[float] = None) -> RateEstimate:
    """gamma_tilde as the largest-scale mean of X_box, with the per-scale trend.

    Trees (GWEstimateRecord) use gamma = (m-1)/m * gamma_tilde; everything
    else uses gamma = gamma_tilde / theta when theta is given.

    Raises:
        TooFewScales: fewer than three scales.
        CensoringTooHigh: a scale where every record is censored too often.
    """
    by_n: dict[int, list[EstimateRecord]] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r)
    if len(by_n) < 3:
        raise TooFewScales(f"need records at >= 3 scales, got {sorted(by_n)}")

    trend = []
    for n in sorted(by_n):
        usable = [r for r in by_n[n] if r.usable]
        if not usable:
            raise CensoringTooHigh(f"every record at n={n} is censored at >= {USABLE_CENSORING:.0%}")
        dropped = len(by_n[n]) - len(usable)
        if dropped:
            logger.warning("n=%d: dropping %d record(s) with censoring >= %.0f%%", n, dropped, 100 * USABLE_CENSORING)
        xs = np.array([r.X_box for r in usable])
        se = float(xs.std(ddof=1) / math.sqrt(len(xs))) if len(xs) > 1 else float("nan")
        trend.append({"n": n, "mean": float(xs.mean()), "se": se, "count": len(xs)})

    increments = [
        {"n_from": a["n"], "n_to": b["n"], "relative": _relative_increment(a["mean"], b["mean"])}
        for a, b in zip(trend, trend[1:])
    ]
    top = trend[-1]
    gamma_tilde = top["mean"]
    if top["count"] > 1:
        ci = (gamma_tilde - Z95 * top["se"], gamma_tilde + Z95 * top["se"])
    else:
        (rec,) = [r for r in by_n[top["n"]] if r.usable]
        ci = (rec.ci[0] / rec.scale, rec.ci[1] / rec.scale)

    if all(isinstance(r, GWEstimateRecord) for r in records):
        m = records[0].m
        return RateEstimate("gw", gamma_tilde, ci, None, m, (m - 1) / m * gamma_tilde, trend, increments)
    gamma = gamma_tilde / theta if theta else None
    return RateEstimate("lattice", gamma_tilde, ci, theta, None, gamma, trend, increments)


# -- inequality checks -------------------------------------------------------

@dataclass
class BoundCheck:
    log_value: float
    bound: float
    holds: bool


def uniform_bound_check(g: Graph, lam: float) -> BoundCheck:
    """log E[tau_G] <= |V| + 2 lam |E| on the exact solver."""
    log_e = math.log(exact_expected_extinction(g, lam))
    bound = g.num_vertices + 2 * lam * g.num_edges
    return BoundCheck(log_e, bound, log_e <= bound)


@dataclass
class SupermultReport:
    num_subgraphs: int
    graph_size: int
    method: str                         # exact | monte-carlo
    log_mean_graph: float
    log_mean_subgraphs: list[float]
    defect: float                       # log E_G - sum log E_Gi
    correction: float                   # (N+1) log(2|G|^3)
    margin: float                       # defect + correction
    max_holds: bool                     # E_G >= max_i E_Gi
    coupling_trials: int = 0
    coupling_violations: int = 0
    extra: dict[str, float] = field(default_factory=dict)


def _validate_subgraphs(g: Graph, subgraphs: Sequence[Sequence[int]]) -> list[np.ndarray]:
    seen = np.zeros(g.num_vertices, dtype=bool)
    out = []
    for i, vs in enumerate(subgraphs):
        arr = np.unique(np.asarray(list(vs), dtype=np.int64))
        if len(arr) == 0:
            raise NotSubgraph(f"subgraph {i} is empty")
        if arr[0] < 0 or arr[-1] >= g.num_vertices:
            raise NotSubgraph(f"subgraph {i} uses a vertex outside the graph")
        if seen[arr].any():
            raise NotDisjoint(f"subgraph {i} overlaps an earlier subgraph")
        seen[arr] = True
        if not is_connected(induced_subgraph(g, arr)):
            raise NotConnected(f"subgraph {i} is not connected")
        out.append(arr)
    return out


def supermult_check(g: Graph, subgraphs: Sequence[Sequence[int]], lam: float, trials: int,
                    master_seed: int, exact: Optional[bool] = None,
                    time_cap: Optional[float] = 1e6) -> SupermultReport:
    """Defect of log E_G against the sum over disjoint connected subgraphs.

    Means are exact when the graph is small enough, Monte Carlo otherwise.
    With ``trials > 0`` every subgraph is also run under the subgraph
    coupling and pointwise violations of tau_Gi <= tau_G are counted.

    Raises:
        NotSubgraph, NotDisjoint, NotConnected
    """
    parts = _validate_subgraphs(g, subgraphs)
    use_exact = g.num_vertices <= EXACT_LIMIT if exact is None else exact

    violations = 0
    coupled_means: list[float] = []
    full_mean = float("nan")
    for i, vs in enumerate(parts):
        sub_taus, full_taus = [], []
        for t in range(trials):
            a, b = coupled_subgraph_simulate(g, vs.tolist(), lam, master_seed, time_cap, trial_index=t)
            sub_taus.append(a.tau)
            full_taus.append(b.tau)
            if a.tau > b.tau:
                violations += 1
        if trials:
            coupled_means.append(float(np.mean(sub_taus)))
            full_mean = float(np.mean(full_taus))

    if use_exact:
        log_g = math.log(exact_expected_extinction(g, lam))
        log_parts = [math.log(exact_expected_extinction(induced_subgraph(g, vs), lam)) for vs in parts]
        method = "exact"
    else:
        if not trials:
            raise InsufficientSamples("Monte Carlo supermultiplicativity check needs trials > 0")
        log_g = math.log(full_mean)
        log_parts = [math.log(x) for x in coupled_means]
        method = "monte-carlo"

    defect = log_g - sum(log_parts)
    correction = (len(parts) + 1) * math.log(2 * g.num_vertices ** 3)
    report = SupermultReport(
        num_subgraphs=len(parts),
        graph_size=g.num_vertices,
        method=method,
        log_mean_graph=log_g,
        log_mean_subgraphs=log_parts,
        defect=defect,
        correction=correction,
        margin=defect + correction,
        max_holds=log_g >= max(log_parts) - 1e-12,
        coupling_trials=trials,
        coupling_violations=violations,
    )
    if trials:
        report.extra["coupled_mean_graph"] = full_mean
        report.extra["coupled_max_subgraph_mean"] = max(coupled_means)
    return report


@dataclass
class TailBoundReport:
    exact_mean: float
    trials: int
    rows: list[dict[str, float]]        # t, empirical, bound, se, ok
    violations: list[float]             # t values where the bound failed

    @property
    def ok(self) -> bool:
        return not self.violations


def tail_bound_check(g: Graph, lam: float, trials: int, t_grid: Optional[Sequence[float]] = None,
                     master_seed: int = 0, workers: int = 1) -> TailBoundReport:
    """Empirical P(tau <= t) against t / E[tau] + 3 binomial SE.

    Raises:
        TooManyVertices: if ``g`` is outside the exact solver's range.
    """
    mean = exact_expected_extinction(g, lam)
    grid = np.linspace(0.1 * mean, 2.0 * mean, 10) if t_grid is None else np.asarray(t_grid, dtype=np.float64)
    cap = float(grid.max()) * 1.001 + 1.0
    outcomes = run_trials(g, ContactConfig(lam=lam, time_cap=cap), trials, master_seed, workers)
    taus = np.array([o.tau if not o.censored else math.inf for o in outcomes])
    rows, violations = [], []
    for t in grid:
        p = float(np.mean(taus <= t))
        se = math.sqrt(p * (1 - p) / trials)
        bound = float(t / mean)
        ok = p <= bound + 3 * se
        rows.append({"t": float(t), "empirical": p, "bound": bound, "se": se, "ok": ok})
        if not ok:
            violations.append(float(t))
    return TailBoundReport(mean, trials, rows, violations)


# -- growth trends -----------------------------------------------------------

@dataclass
class GrowthReport:
    sizes: list[int]
    rates: list[float]              # log_mean / |G| per size
    slope: float                    # least-squares slope of log_mean against |G|
    min_rate: float
    linear_growth: bool             # positive slope and every rate positive


def growth_trend(records: Sequence[EstimateRecord]) -> GrowthReport:
    """How log E-hat scales with |G| across records (reported, not asserted)."""
    if len(records) < 2:
        raise InsufficientSamples("need at least two records for a growth trend")
    ordered = sorted(records, key=lambda r: (r.graph_size, r.n, r.seed))
    sizes = [r.graph_size for r in ordered]
    logs = [r.log_mean for r in ordered]
    rates = [lg / s for lg, s in zip(logs, sizes)]
    slope = float(np.polyfit(sizes, logs, 1)[0]) if len(set(sizes)) > 1 else float("nan")
    return GrowthReport(sizes, rates, slope, min(rates), bool(slope > 0 and min(rates) > 0))


def gw_trend_check(records: Sequence[GWEstimateRecord]) -> list[dict[str, float]]:
    """Mean Y per generation against the allowance E[Y_n] >= E[Y_{n-1}] - n^4 / m^n."""
    by_n: dict[int, list[float]] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r.Y)
    if not records:
        return []
    m = records[0].m
    ns = sorted(by_n)
    out = []
    for a, b in zip(ns, ns[1:]):
        ya, yb = float(np.mean(by_n[a])), float(np.mean(by_n[b]))
        allowance = b ** 4 / m ** b
        out.append({"n_from": a, "n_to": b, "Y_from": ya, "Y_to": yb,
                    "allowance": allowance, "holds": yb >= ya - allowance})
    return out
