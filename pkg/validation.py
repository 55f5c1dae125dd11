"""Acceptance battery: exact oracles, inequalities, couplings, samplers, engineering.

``validate_suite("quick")`` runs every criterion at reduced sample sizes;
``"full"`` uses the sizes the acceptance thresholds were stated for.
"""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable

import numpy as np

from config import ContactConfig, ExperimentConfig, ModelConfig
from contact.exact import exact_expected_extinction
from contact.simulator import coupled_simulate, coupled_subgraph_simulate
from contact.trials import estimate_mean_extinction
from estimators import Normalization, compute_record, supermult_check, tail_bound_check, uniform_bound_check
from graphs.core import BoxSpec, connected_components
from graphs.gff import sample_gff_field
from graphs.gw import gen_gw_tree, gw_limit_diagnostics
from graphs.interlacements import sample_interlacements, sample_interlacements_coupled
from graphs.lattice import site_index
from graphs.potential import killed_green
from graphs.registry import generate
from graphs.rgg import brute_force_pairs, sample_rgg
from graphs.zoo import complete_graph, path_graph, zoo
from harness import RESULTS_FILE, SUMMARY_FILE, run_experiment
from seeding import derive_seed
from structure import (
    census_over_seeds,
    density_series,
    infinite_cluster_proxy,
    mst_degree_check,
    rgg_component_report,
    uniqueness_event,
)

logger = logging.getLogger(__name__)

SUPERMULT_FLOOR = 0.0       # lower bound on D + (N+1) log(2|G|^3) over the path families
GFF_TOLERANCE = 0.05
# bulk finite clusters at p=0.7, n=64 reach size 11; 64^0.75 is about 22.6
CENSUS_EPSILON = 0.75


@dataclass(frozen=True)
class SuiteLevel:
    name: str
    mc_trials: int              # exact-oracle comparison
    tail_trials: int
    coupling_trials: int
    perc_seeds: int
    gw_trees: int
    gff_samples: int
    ri_samples: int
    rgg_seeds: int
    workers: int                # parallel leg of the engineering check


QUICK = SuiteLevel("quick", 4_000, 4_000, 1_000, 40, 2_000, 500, 300, 30, 2)
FULL = SuiteLevel("full", 100_000, 100_000, 10_000, 200, 10_000, 2_000, 2_000, 100, 8)
LEVELS = {"quick": QUICK, "full": FULL}


@dataclass
class CriterionResult:
    ok: bool
    name: str
    measured: dict[str, Any] = field(default_factory=dict)
    detail: str = ""
    seconds: float = 0.0


@dataclass
class SuiteReport:
    level: str
    criteria: list[CriterionResult]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.criteria)

    def to_dict(self) -> dict[str, Any]:
        return {"level": self.level, "ok": self.ok, "criteria": [asdict(c) for c in self.criteria]}

    def write(self, path: str) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, default=str)
            f.write("\n")


# -- criteria ----------------------------------------------------------------

def check_exact_oracle(level: SuiteLevel) -> CriterionResult:
    hand = {
        "single_vertex": (exact_expected_extinction(path_graph(1), 2.0), 1.0),
        "K2_lambda2": (exact_expected_extinction(complete_graph(2), 2.0), 2.5),
        "P3_lambda0": (exact_expected_extinction(path_graph(3), 0.0), 11 / 6),
    }
    hand_ok = all(math.isclose(a, b, rel_tol=1e-9) for a, b in hand.values())
    measured: dict[str, Any] = {k: v[0] for k, v in hand.items()}
    misses = []
    for name, g in zoo().items():
        for lam in (0.5, 2.0):
            exact = exact_expected_extinction(g, lam)
            est = estimate_mean_extinction(g, ContactConfig(lam=lam, time_cap=None), level.mc_trials,
                                           derive_seed(7, len(g), int(lam * 10)))
            z = abs(est.mean - exact) / est.std_error
            measured[f"{name}_lambda{lam}"] = {"exact": exact, "mc": est.mean, "se": est.std_error, "z": z}
            if z > 3:
                misses.append(f"{name} lambda={lam}")
    detail = "" if not misses else "outside 3 SE: " + ", ".join(misses)
    return CriterionResult(hand_ok and not misses, "exact-oracle", measured, detail)


def check_inequalities(level: SuiteLevel) -> CriterionResult:
    measured: dict[str, Any] = {}
    failures = []
    for i, (name, g) in enumerate(zoo().items()):
        for lam in (0.5, 2.0):
            b = uniform_bound_check(g, lam)
            measured[f"uniform_{name}_lambda{lam}"] = {"log_mean": b.log_value, "bound": b.bound}
            if not b.holds:
                failures.append(f"uniform bound {name} lambda={lam}")
            tail = tail_bound_check(g, lam, level.tail_trials, master_seed=derive_seed(11, i, int(lam * 10)))
            measured[f"tail_{name}_lambda{lam}"] = {"violations": tail.violations, "rows": tail.rows}
            if not tail.ok:
                failures.append(f"tail bound {name} lambda={lam} at t={tail.violations}")
    return CriterionResult(not failures, "inequalities", measured, "; ".join(failures))


def check_monotone_coupling(level: SuiteLevel) -> CriterionResult:
    rate_violations = 0
    sub_violations = 0
    for name, g in zoo().items():
        half = list(range(max(1, g.num_vertices // 2)))
        for t in range(level.coupling_trials):
            lo, hi = coupled_simulate(g, [0.5, 2.0], 13, time_cap=None, trial_index=t)
            if lo.tau > hi.tau:
                rate_violations += 1
            sub, full = coupled_subgraph_simulate(g, half, 2.0, 17, time_cap=None, trial_index=t)
            if sub.tau > full.tau:
                sub_violations += 1
    measured = {"trials_per_graph": level.coupling_trials, "rate_violations": rate_violations,
                "subgraph_violations": sub_violations}
    return CriterionResult(rate_violations == 0 and sub_violations == 0, "monotone-coupling", measured)


def check_supermultiplicativity(level: SuiteLevel) -> CriterionResult:
    families = {
        "P4/2xP2": (path_graph(4), [[0, 1], [2, 3]]),
        "P6/3xP2": (path_graph(6), [[0, 1], [2, 3], [4, 5]]),
    }
    measured: dict[str, Any] = {"floor": SUPERMULT_FLOOR}
    ok = True
    for name, (g, parts) in families.items():
        rep = supermult_check(g, parts, 2.0, min(level.coupling_trials, 2_000), 19, exact=True)
        measured[name] = {"defect": rep.defect, "correction": rep.correction, "margin": rep.margin,
                          "max_holds": rep.max_holds, "coupling_violations": rep.coupling_violations}
        ok &= rep.max_holds and rep.coupling_violations == 0 and rep.margin >= SUPERMULT_FLOOR
    return CriterionResult(ok, "supermultiplicativity", measured)


def check_rate_trend(level: SuiteLevel) -> CriterionResult:
    # unit steps rise once from P4 to P6; steps of two decrease throughout
    ns = list(range(4, 13, 2))
    rates = [math.log(exact_expected_extinction(path_graph(n), 2.0)) / n for n in ns]
    incs = [abs(b - a) / a for a, b in zip(rates, rates[1:])]
    decreasing = all(b < a for a, b in zip(incs, incs[1:]))
    measured = {"n": ns, "log_mean_over_n": rates, "increments": incs}
    return CriterionResult(decreasing and incs[-1] < 0.15, "rate-trend", measured)


def check_percolation(level: SuiteLevel) -> CriterionResult:
    model = ModelConfig(model="bond", d=2, p=0.7)
    reports = census_over_seeds(model, 64, level.perc_seeds, CENSUS_EPSILON, master_seed=23)
    census_freq = float(np.mean([r.verdict_unique_giant and r.verdict_others for r in reports]))
    rows = density_series(model, [16, 64], level.perc_seeds, master_seed=29)
    uniq = float(np.mean([uniqueness_event(model, 32, derive_seed(31, s)) for s in range(level.perc_seeds)]))
    proxies = [infinite_cluster_proxy(generate(model, 32, derive_seed(31, s)), 16, CENSUS_EPSILON)
               for s in range(level.perc_seeds)]
    measured = {"epsilon": CENSUS_EPSILON, "census_frequency": census_freq, "variance_n16": rows[0].variance,
                "variance_n64": rows[1].variance, "uniqueness_frequency": uniq,
                "cluster_proxy_frequency": float(np.mean([p.holds for p in proxies]))}
    ok = census_freq >= 0.95 and rows[1].variance < rows[0].variance and uniq >= 0.95
    return CriterionResult(ok, "percolation-structure", measured)


def check_gw(level: SuiteLevel) -> CriterionResult:
    nu = {0: 0.25, 1: 0.25, 2: 0.5}
    xs, ys = [], []
    records = []
    for s in range(level.gw_trees):
        records.append(gen_gw_tree(nu, 6, "none", derive_seed(37, s)))
        gens = records[-1].generations
        for a, b in zip(gens, gens[1:]):
            if a > 0:
                xs.append(a)
                ys.append(b)
    x, y = np.array(xs, dtype=float), np.array(ys, dtype=float)
    slope = y.sum() / x.sum()
    resid_var = float(np.sum((y - slope * x) ** 2 / x) / (len(x) - 1))
    se = math.sqrt(resid_var / x.sum())
    m = 1.25
    binary = gen_gw_tree({2: 1.0}, 5, "none", 0)
    binary_ok = binary.size == 2 ** 6 - 1
    rec = gen_gw_tree(nu, 4, "survival", 41)
    r = compute_record(rec.tree, 3.7, 0.1, Normalization.tree(rec))
    identity_ok = math.isclose(r.Y * rec.m ** rec.n, r.X * rec.size, rel_tol=1e-12)
    measured = {"slope": slope, "se": se, "m": m, "binary_size": binary.size, "identity_ok": identity_ok,
                "limits": asdict(gw_limit_diagnostics(records))}
    return CriterionResult(abs(slope - m) <= 3 * se and binary_ok and identity_ok, "galton-watson", measured)


def check_potential_samplers(level: SuiteLevel) -> CriterionResult:
    box = BoxSpec(3, 3)
    origin = int(site_index(np.zeros((1, 3), dtype=np.int64), 3)[0])
    phi0 = np.array([sample_gff_field(box, 4, derive_seed(43, s)).field[origin] for s in range(level.gff_samples)])
    g00 = killed_green(3, 12)
    var = float(phi0.var(ddof=1))
    rel_se = math.sqrt(2.0 / (len(phi0) - 1))
    gff_ok = abs(var - g00) / g00 <= max(GFF_TOLERANCE, 3 * rel_se)

    ri_box = BoxSpec(4, 3)
    ri_origin = int(site_index(np.zeros((1, 3), dtype=np.int64), 4)[0])
    hits = np.array([sample_interlacements(ri_box, 1.0, 16, derive_seed(47, s)).occupied[ri_origin]
                     for s in range(level.ri_samples)], dtype=float)
    p_hat = float(hits.mean())
    p_true = 1.0 - math.exp(-1.0 / killed_green(3, 16))
    p_se = math.sqrt(p_true * (1 - p_true) / len(hits))
    ri_ok = abs(p_hat - p_true) <= 3 * p_se

    nested = True
    for s in range(20):
        samples = sample_interlacements_coupled(ri_box, [0.5, 1.0, 2.0], 16, derive_seed(53, s))
        for a, b in zip(samples, samples[1:]):
            nested &= bool(np.all(b.occupied[a.occupied]))
    measured = {"gff_var": var, "green_00": g00, "gff_rel_se": rel_se, "ri_p_hat": p_hat,
                "ri_p_true": p_true, "ri_se": p_se, "ri_nested": nested}
    return CriterionResult(gff_ok and ri_ok and nested, "potential-samplers", measured)


def check_rgg(level: SuiteLevel) -> CriterionResult:
    worst = 0
    edge_mismatches = 0
    reports = []
    for s in range(level.rgg_seeds):
        sample = sample_rgg(BoxSpec(8, 2, "continuum"), 1.5, derive_seed(59, s))
        g = sample.graph
        reports.append(rgg_component_report(g, 8))
        if g.num_vertices <= 500:
            brute = brute_force_pairs(sample.points, 1.5)
            if not np.array_equal(brute.reshape(-1, 2), g.edges):
                edge_mismatches += 1
        for comp in connected_components(g):
            if comp.size > 1:
                worst = max(worst, mst_degree_check(comp.subgraph())[0])
    measured = {"max_mst_degree": worst, "edge_mismatches": edge_mismatches,
                "spanning_frequency": float(np.mean([r.diameter_ok for r in reports])),
                "small_others_frequency": float(np.mean([r.others_ok for r in reports]))}
    return CriterionResult(worst <= 6 and edge_mismatches == 0, "rgg", measured)


def check_engineering(level: SuiteLevel) -> CriterionResult:
    base = ExperimentConfig(model=ModelConfig(model="bond", d=2, p=0.7), lam=0.3, n_list=[2, 3, 4],
                            seeds=2, trials=20, time_cap=100.0, master_seed=61)
    with tempfile.TemporaryDirectory() as tmp:
        a, b = os.path.join(tmp, "serial"), os.path.join(tmp, "parallel")
        run_experiment(replace(base, workers=1), a)
        run_experiment(replace(base, workers=level.workers), b)
        with open(os.path.join(a, SUMMARY_FILE), "rb") as f:
            summary_before = f.read()
        again = run_experiment(replace(base, workers=1, resume=True), a)
        with open(os.path.join(a, RESULTS_FILE), "rb") as fa, open(os.path.join(b, RESULTS_FILE), "rb") as fb:
            same_csv = fa.read() == fb.read()
        with open(os.path.join(a, SUMMARY_FILE), "rb") as f:
            same_summary = f.read() == summary_before
    measured = {"identical_results": same_csv, "resume_recomputed": again.computed,
                "identical_summary_after_resume": same_summary}
    return CriterionResult(same_csv and again.computed == 0 and same_summary, "engineering", measured)


CRITERIA: list[Callable[[SuiteLevel], CriterionResult]] = [
    check_exact_oracle,
    check_inequalities,
    check_monotone_coupling,
    check_supermultiplicativity,
    check_rate_trend,
    check_percolation,
    check_gw,
    check_potential_samplers,
    check_rgg,
    check_engineering,
]


def validate_suite(level: str = "quick") -> SuiteReport:
    """Run every criterion; a raising criterion counts as a failure."""
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r} (expected quick or full)")
    suite = LEVELS[level]
    results = []
    for check in CRITERIA:
        start = time.monotonic()
        try:
            result = check(suite)
        except Exception as e:
            logger.exception("criterion %s raised", check.__name__)
            result = CriterionResult(False, check.__name__.removeprefix("check_").replace("_", "-"),
                                     detail=f"{type(e).__name__}: {e}")
        result.seconds = time.monotonic() - start
        log = logger.info if result.ok else logger.error
        log("%-24s %s (%.1fs)", result.name, "ok" if result.ok else "FAILED", result.seconds)
        results.append(result)
    return SuiteReport(level, results)
