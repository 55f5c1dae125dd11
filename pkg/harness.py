"""Experiment pipeline: sweep scales and seeds, estimate, persist, resume.

Output directory layout::

    config.txt        canonical config of the run
    manifest.jsonl    append-only journal, one line per completed unit
    results.csv       one EstimateRecord row per unit, sorted by (n, seed index)
    summary.json      rate estimate and diagnostics (no timestamps)
    trials/           per-unit trial dumps (dump_trials)
    graphs/           per-unit maximal components (dump_graphs)

A unit is one (n, seed index) pair. Its manifest key is the SHA-256 of the
config values that determine its output, so resume skips exactly the units
whose inputs are unchanged.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Any, Iterator, Optional

from config import LAMBDA_C_LINE, ExperimentConfig, serialize_config, validate_config
from contact.trials import AllCensored, estimate_mean_extinction, write_trial_dump
from estimators import (
    RESULT_FIELDS,
    EstimateRecord,
    EstimatorError,
    GWEstimateRecord,
    Normalization,
    compute_record,
    estimate_theta,
    gamma_trend,
    growth_trend,
    gw_trend_check,
)
from graphs.core import EmptyGraph, maximal_component
from graphs.registry import generate, generate_gw, model_box
from graphs.serialize import dumps_graph
from seeding import derive_seed

logger = logging.getLogger(__name__)

CONFIG_FILE = "config.txt"
MANIFEST_FILE = "manifest.jsonl"
RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.json"


class PartialResults(Exception):
    """Raised when a run stops early; everything completed so far is on disk."""

    def __init__(self, out_dir: str, completed: int, total: int) -> None:
        self.out_dir = out_dir
        self.completed = completed
        self.total = total
        super().__init__(f"run interrupted after {completed}/{total} units; partial results in {out_dir}")


@dataclass
class RunResult:
    out_dir: str
    records: list[EstimateRecord]
    computed: int                   # units simulated in this invocation
    skipped: int                    # units found in the manifest
    summary: dict[str, Any] = field(default_factory=dict)


# -- units -------------------------------------------------------------------

def unit_key(cfg: ExperimentConfig, n: int, seed_index: int) -> str:
    block = {
        "model": cfg.model.model,
        "params": cfg.model.params_string(),
        "lambda": repr(float(cfg.lam)),
        "trials": cfg.trials,
        "time_cap": repr(cfg.time_cap),
        "master_seed": cfg.master_seed,
        "n": n,
        "seed_index": seed_index,
    }
    return hashlib.sha256(json.dumps(block, sort_keys=True).encode()).hexdigest()


def _record_to_json(rec: EstimateRecord) -> dict[str, Any]:
    data = dataclasses.asdict(rec)
    data["kind"] = "gw" if isinstance(rec, GWEstimateRecord) else "box"
    return data


def _record_from_json(data: dict[str, Any]) -> EstimateRecord:
    data = dict(data)
    kind = data.pop("kind")
    data["ci"] = tuple(data["ci"])
    return GWEstimateRecord(**data) if kind == "gw" else EstimateRecord(**data)


def _run_unit(args: tuple[ExperimentConfig, int, int]) -> dict[str, Any]:
    """Generate, extract the maximal component, estimate. Writes nothing."""
    cfg, n, s = args
    graph_seed = derive_seed(cfg.master_seed, n, s)
    trial_seed = derive_seed(cfg.master_seed, n, s, 1)
    entry: dict[str, Any] = {"key": unit_key(cfg, n, s), "n": n, "seed_index": s, "graph_seed": graph_seed}

    if cfg.model.model == "gw":
        gw = generate_gw(cfg.model, n, graph_seed)
        g = gw.tree
        norm = Normalization.tree(gw)
    else:
        g = generate(cfg.model, n, graph_seed)
        box = model_box(cfg.model, n)
        norm = Normalization.box(n, box.d, box.flavor)

    try:
        sub = maximal_component(g).subgraph()
    except EmptyGraph:
        entry.update(status="empty", graph_size=0, box_size=norm.box_size)
        return entry
    entry.update(graph_size=sub.num_vertices, box_size=norm.box_size)
    if cfg.dump_graphs:
        entry["graph_text"] = dumps_graph(sub)

    try:
        est = estimate_mean_extinction(sub, cfg.contact(), cfg.trials, trial_seed)
    except AllCensored:
        entry["status"] = "all-censored"
        return entry
    rec = compute_record(sub, est.mean, est.std_error, norm, est.censored_fraction,
                         est.uncensored_taus().tolist(), seed=graph_seed)
    rec = dataclasses.replace(rec, model=cfg.model.model, params=cfg.model.params_string())
    entry.update(status="ok", record=_record_to_json(rec))
    if cfg.dump_trials:
        entry["outcomes"] = est.outcomes
    return entry


def _iter_units(pending: list[tuple[ExperimentConfig, int, int]], workers: int) -> Iterator[dict[str, Any]]:
    if workers <= 1 or len(pending) < 2:
        for task in pending:
            yield _run_unit(task)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_run_unit, pending)


# -- journal -----------------------------------------------------------------

def read_manifest(out_dir: str) -> dict[str, dict[str, Any]]:
    """Completed units by key; a truncated last line is ignored."""
    path = os.path.join(out_dir, MANIFEST_FILE)
    entries: dict[str, dict[str, Any]] = {}
    if not os.path.exists(path):
        return entries
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                logger.warning("skipping unreadable manifest line in %s", path)
                continue
            entries[entry["key"]] = entry
    return entries


def _ends_with_newline(path: str) -> bool:
    with open(path, "rb") as f:
        f.seek(-1, os.SEEK_END)
        return f.read(1) == b"\n"


def _persist_entry(out_dir: str, manifest: IO[str], entry: dict[str, Any]) -> None:
    n, s = entry["n"], entry["seed_index"]
    outcomes = entry.pop("outcomes", None)
    if outcomes is not None:
        os.makedirs(os.path.join(out_dir, "trials"), exist_ok=True)
        write_trial_dump(os.path.join(out_dir, "trials", f"n{n}_s{s}.csv"), outcomes)
    text = entry.pop("graph_text", None)
    if text is not None:
        os.makedirs(os.path.join(out_dir, "graphs"), exist_ok=True)
        with open(os.path.join(out_dir, "graphs", f"n{n}_s{s}.graph"), "w") as f:
            f.write(text)
    manifest.write(json.dumps(entry, sort_keys=True) + "\n")
    manifest.flush()


# -- outputs -----------------------------------------------------------------

def write_results(path: str, records: list[EstimateRecord]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=RESULT_FIELDS, lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow(rec.row())


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def build_summary(cfg: ExperimentConfig, entries: list[dict[str, Any]], records: list[EstimateRecord]) -> dict[str, Any]:
    summary: dict[str, Any] = {
        "model": cfg.model.model,
        "params": cfg.model.params_string(),
        "lambda": cfg.lam,
        "n_list": list(cfg.n_list),
        "seeds": cfg.seeds,
        "trials": cfg.trials,
        "master_seed": cfg.master_seed,
        "units": len(entries),
        "records": len(records),
        "empty_units": sum(1 for e in entries if e["status"] == "empty"),
        "censored_units": sum(1 for e in entries if e["status"] == "all-censored"),
        "unusable_records": sum(1 for r in records if not r.usable),
        "below_line_critical_rate": cfg.lam <= LAMBDA_C_LINE,
    }
    theta = None
    if cfg.model.model != "gw":
        try:
            est = estimate_theta((e["graph_size"], e["box_size"]) for e in entries)
            theta = est.theta
            summary["theta"] = {"theta": est.theta, "se": est.se, "per_scale": est.per_scale}
        except EstimatorError as e:
            summary["theta"] = {"error": str(e)}
    try:
        summary["rate"] = gamma_trend(records, theta).to_dict()
    except EstimatorError as e:
        summary["rate"] = {"error": str(e)}
    try:
        growth = growth_trend(records)
        summary["growth"] = dataclasses.asdict(growth)
    except EstimatorError as e:
        summary["growth"] = {"error": str(e)}
    if cfg.model.model == "gw":
        summary["gw_trend"] = gw_trend_check([r for r in records if isinstance(r, GWEstimateRecord)])
    return _json_safe(summary)


def _finalize(cfg: ExperimentConfig, out_dir: str) -> tuple[list[EstimateRecord], dict[str, Any]]:
    journal = read_manifest(out_dir)
    entries = []
    for n in cfg.n_list:
        for s in range(cfg.seeds):
            entry = journal.get(unit_key(cfg, n, s))
            if entry is not None:
                entries.append(entry)
    records = [_record_from_json(e["record"]) for e in entries if e["status"] == "ok"]
    write_results(os.path.join(out_dir, RESULTS_FILE), records)
    summary = build_summary(cfg, entries, records)
    with open(os.path.join(out_dir, SUMMARY_FILE), "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return records, summary


# -- pipeline ----------------------------------------------------------------

def run_experiment(cfg: ExperimentConfig, out_dir: Optional[str] = None) -> RunResult:
    """Run every (n, seed) unit of ``cfg`` and write the result bundle.

    With ``cfg.resume`` units already in the manifest are skipped; without
    it the manifest is started afresh. Unit results are identical for any
    worker count.

    Raises:
        ConfigError: if ``cfg`` is invalid.
        PartialResults: on keyboard interrupt, after flushing outputs.
    """
    validate_config(cfg)
    out_dir = out_dir or cfg.out
    os.makedirs(out_dir, exist_ok=True)
    if cfg.lam <= LAMBDA_C_LINE:
        logger.warning("lambda=%g is at or below the critical rate of the line (%.4f); "
                       "extinction times may not grow exponentially", cfg.lam, LAMBDA_C_LINE)

    with open(os.path.join(out_dir, CONFIG_FILE), "w") as f:
        f.write(serialize_config(cfg))
    manifest_path = os.path.join(out_dir, MANIFEST_FILE)
    if not cfg.resume and os.path.exists(manifest_path):
        os.remove(manifest_path)
    done = read_manifest(out_dir) if cfg.resume else {}

    units = [(n, s) for n in cfg.n_list for s in range(cfg.seeds)]
    pending = [(cfg, n, s) for n, s in units if unit_key(cfg, n, s) not in done]
    skipped = len(units) - len(pending)
    workers = cfg.resolved_workers()
    logger.info("run %s: %d units (%d from manifest), %d worker(s), output %s",
                cfg.model.model, len(units), skipped, workers, out_dir)

    computed = 0
    try:
        with open(manifest_path, "a") as manifest:
            if manifest.tell() and not _ends_with_newline(manifest_path):
                manifest.write("\n")
            for entry in _iter_units(pending, workers):
                _persist_entry(out_dir, manifest, entry)
                computed += 1
                logger.info("unit n=%d seed=%d %s (%d/%d)", entry["n"], entry["seed_index"],
                            entry["status"], skipped + computed, len(units))
    except KeyboardInterrupt:
        _finalize(cfg, out_dir)
        raise PartialResults(out_dir, skipped + computed, len(units)) from None

    records, summary = _finalize(cfg, out_dir)
    return RunResult(out_dir, records, computed, skipped, summary)
