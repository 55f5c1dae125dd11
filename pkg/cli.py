"""Command line: generate, simulate, estimate, census, run, validate, serve.

Exit codes: 0 ok, 1 failed suite or domain error, 2 config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict
from typing import Optional

from config import ConfigError, ExperimentConfig, MonitorConfig, load_config, validate_config
from contact.exact import dump_system, exact_expected_extinction
from contact.trials import estimate_mean_extinction, write_trial_dump
from estimators import Normalization, compute_record
from graphs.core import Graph, maximal_component
from graphs.registry import generate, generate_gw
from graphs.serialize import load_graph, write_graph
from harness import PartialResults, run_experiment
from logging_config import setup_logging
from run_state import CENSUS_FILE, CENSUS_SUMMARY_FILE
from seeding import derive_seed
from structure import census_over_seeds, census_summary, write_census_csv

logger = logging.getLogger("metastab.cli")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def _experiment(args: argparse.Namespace) -> ExperimentConfig:
    """Config file (or defaults) with command-line overrides applied."""
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.out is not None:
        cfg.out = args.out
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    if args.resume:
        cfg.resume = True
    if getattr(args, "lam", None) is not None:
        cfg.lam = args.lam
    if getattr(args, "trials", None) is not None:
        cfg.trials = args.trials
    if getattr(args, "time_cap", None) is not None:
        cfg.time_cap = args.time_cap
    validate_config(cfg)
    return cfg


def _graph(args: argparse.Namespace, cfg: ExperimentConfig) -> tuple[Graph, Normalization]:
    """The graph named by ``--graph``, or a fresh sample at ``--n``."""
    if args.graph:
        g = load_graph(args.graph)
        prov = g.provenance
        norm = Normalization.box(prov.n, g.dim) if g.coords is not None and prov.n > 0 else Normalization.segment(g.num_vertices)
        return g, norm
    seed = derive_seed(cfg.master_seed, args.n, args.seed_index)
    if cfg.model.model == "gw":
        rec = generate_gw(cfg.model, args.n, seed)
        return rec.tree, Normalization.tree(rec)
    g = generate(cfg.model, args.n, seed)
    return g, Normalization.box(args.n, cfg.model.d, "continuum" if cfg.model.model == "rgg" else "lattice")


def _maximal(g: Graph, keep_all: bool) -> Graph:
    return g if keep_all else maximal_component(g).subgraph()


# -- subcommands -------------------------------------------------------------

def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _experiment(args)
    g, _ = _graph(args, cfg)
    if args.maximal:
        g = maximal_component(g).subgraph()
    if args.output:
        with open(args.output, "w") as f:
            write_graph(g, f)
        logger.info("wrote %d vertices, %d edges to %s", g.num_vertices, g.num_edges, args.output)
    else:
        write_graph(g, sys.stdout)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _experiment(args)
    g, _ = _graph(args, cfg)
    g = _maximal(g, args.whole_graph)
    out: dict = {"vertices": g.num_vertices, "edges": g.num_edges, "lambda": cfg.lam}
    if args.exact:
        out["exact_mean"] = exact_expected_extinction(g, cfg.lam)
        if args.dump_system:
            dump_system(g, cfg.lam, args.dump_system)
            out["system"] = args.dump_system
    else:
        est = estimate_mean_extinction(g, cfg.contact(), cfg.trials, cfg.master_seed, cfg.resolved_workers())
        out.update(mean=est.mean, se=est.std_error, censored=est.censored_count, trials=est.trials)
        if args.dump_trials:
            write_trial_dump(args.dump_trials, est.outcomes)
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    cfg = _experiment(args)
    g, norm = _graph(args, cfg)
    g = _maximal(g, args.whole_graph)
    est = estimate_mean_extinction(g, cfg.contact(), cfg.trials, cfg.master_seed, cfg.resolved_workers())
    rec = compute_record(g, est.mean, est.std_error, norm, est.censored_fraction,
                         est.uncensored_taus().tolist(), seed=cfg.master_seed)
    print(json.dumps(asdict(rec), indent=2))
    return EXIT_OK


def cmd_census(args: argparse.Namespace) -> int:
    cfg = _experiment(args)
    seeds = args.seeds or cfg.seeds
    os.makedirs(cfg.out, exist_ok=True)
    reports = []
    for n in ([args.n] if args.n else cfg.n_list):
        reports.extend(census_over_seeds(cfg.model, n, seeds, cfg.epsilon, cfg.master_seed, cfg.resolved_workers()))
    write_census_csv(os.path.join(cfg.out, CENSUS_FILE), reports)
    by_n = {}
    for r in reports:
        by_n.setdefault(r.n, []).append(r)
    summary = {str(n): census_summary(rs) for n, rs in by_n.items()}
    with open(os.path.join(cfg.out, CENSUS_SUMMARY_FILE), "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _experiment(args)
    try:
        result = run_experiment(cfg)
    except PartialResults as e:
        logger.error("%s", e)
        return EXIT_FAILURE
    logger.info("%d units computed, %d from manifest; results in %s", result.computed, result.skipped, result.out_dir)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    from validation import validate_suite

    report = validate_suite(args.level)
    if args.report:
        report.write(args.report)
    for c in report.criteria:
        print(f"  {'✓' if c.ok else '✗'} {c.name:<24} {c.detail}")
    print("PASS" if report.ok else "FAIL")
    return EXIT_OK if report.ok else EXIT_FAILURE


def cmd_serve(args: argparse.Namespace) -> int:
    from server import serve

    out = args.out or MonitorConfig().out
    serve(MonitorConfig(host=args.host, port=args.port, out=out))
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Experiment config file")
    common.add_argument("--out", help="Output directory (default $METASTAB_OUT or ./results)")
    common.add_argument("--seed", type=int, help="Master seed (u64)")
    common.add_argument("--workers", type=int, help="Worker processes (0 = all cores)")
    common.add_argument("--resume", action="store_true", help="Skip units already in the manifest")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

    graph_src = argparse.ArgumentParser(add_help=False)
    graph_src.add_argument("--graph", help="Read the graph from this file instead of sampling")
    graph_src.add_argument("--n", type=int, default=4, help="Scale (generation count for gw)")
    graph_src.add_argument("--seed-index", type=int, default=0, help="Seed index at this scale")

    dynamics = argparse.ArgumentParser(add_help=False)
    dynamics.add_argument("--lambda", dest="lam", type=float, help="Infection rate")
    dynamics.add_argument("--trials", type=int, help="Contact-process trials")
    dynamics.add_argument("--time-cap", type=float, help="Censoring horizon")
    dynamics.add_argument("--whole-graph", action="store_true", help="Do not restrict to the maximal component")

    parser = argparse.ArgumentParser(prog="metastab", description="Contact process extinction on random graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common, graph_src], help="Sample a graph and write it")
    p.add_argument("--output", help="Graph file to write (default stdout)")
    p.add_argument("--maximal", action="store_true", help="Write only the maximal component")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate", parents=[common, graph_src, dynamics], help="Mean extinction time of one graph")
    p.add_argument("--exact", action="store_true", help="Use the exact solver (<= 20 vertices)")
    p.add_argument("--dump-system", help="With --exact: write the sparse system (Matrix Market)")
    p.add_argument("--dump-trials", help="Write per-trial outcomes to this CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", parents=[common, graph_src, dynamics], help="Normalized record of one graph")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("census", parents=[common], help="Component census over seeds")
    p.add_argument("--n", type=int, help="Single scale (default: every scale in the config)")
    p.add_argument("--seeds", type=int, help="Seeds per scale (default: config)")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("run", parents=[common], help="Full pipeline over scales and seeds")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", parents=[common], help="Acceptance battery")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--report", help="Write the JSON report here")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", parents=[common], help="Read-only run monitor")
    p.add_argument("--host", default=MonitorConfig.host)
    p.add_argument("--port", type=int, default=MonitorConfig.port)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging("metastab", args.log_level)
    try:
        return args.func(args)
    except ConfigError as e:
        logger.error("config error: %s", e)
        return EXIT_CONFIG
    except Exception as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
