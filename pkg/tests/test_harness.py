#!/usr/bin/env python3
"""Test the experiment pipeline: outputs, resume and worker independence.

Run: python3 tests/test_harness.py
"""

import csv
import json
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

from config import ConfigError, ExperimentConfig, ModelConfig, load_config
from estimators import RESULT_FIELDS
from graphs.serialize import load_graph
from harness import (
    CONFIG_FILE,
    MANIFEST_FILE,
    RESULTS_FILE,
    SUMMARY_FILE,
    read_manifest,
    run_experiment,
    unit_key,
)


def _config(out: str, **overrides) -> ExperimentConfig:
    # subcritical rate keeps every unit fast
    cfg = ExperimentConfig(
        model=ModelConfig(model="bond", d=2, p=0.8),
        lam=0.3,
        n_list=[2, 3, 4],
        seeds=2,
        trials=20,
        time_cap=100.0,
        master_seed=11,
        out=out,
        workers=1,
    )
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


def _read(path: str) -> str:
    with open(path) as f:
        return f.read()


def test_smoke_and_resume():
    print("=" * 60)
    print("TEST: Full run, then resume")
    print("=" * 60)

    with tempfile.TemporaryDirectory() as tmp:
        cfg = _config(tmp, dump_trials=True, dump_graphs=True)
        first = run_experiment(cfg)
        assert first.computed == 6 and first.skipped == 0
        for name in (CONFIG_FILE, MANIFEST_FILE, RESULTS_FILE, SUMMARY_FILE):
            assert os.path.exists(os.path.join(tmp, name)), name
        assert load_config(os.path.join(tmp, CONFIG_FILE)) == cfg
        print("  ✓ config, manifest, results and summary written")

        with open(os.path.join(tmp, RESULTS_FILE), newline="") as f:
            reader = csv.DictReader(f)
            rows = list(reader)
            assert tuple(reader.fieldnames) == RESULT_FIELDS
        assert [int(r["n"]) for r in rows] == [2, 2, 3, 3, 4, 4]
        assert all(r["model"] == "bond" and r["params"] == "d=2;p=0.8" for r in rows)
        print(f"  ✓ {len(rows)} result rows in (n, seed) order")

        summary = json.loads(_read(os.path.join(tmp, SUMMARY_FILE)))
        assert summary["units"] == 6 and summary["below_line_critical_rate"]
        assert "gamma_tilde" in summary["rate"]
        assert "theta" in summary["theta"]
        print("  ✓ summary has theta and the rate trend")

        assert os.path.exists(os.path.join(tmp, "trials", "n3_s1.csv"))
        g = load_graph(os.path.join(tmp, "graphs", "n3_s1.graph"))
        assert g.num_vertices == int(rows[3]["graph_size"])
        print("  ✓ trial and graph dumps per unit")

        results_before = _read(os.path.join(tmp, RESULTS_FILE))
        summary_before = _read(os.path.join(tmp, SUMMARY_FILE))
        with open(os.path.join(tmp, MANIFEST_FILE), "a") as f:
            f.write('{"key": "trunc')
        again = run_experiment(_config(tmp, resume=True, dump_trials=True, dump_graphs=True))
        assert again.computed == 0 and again.skipped == 6
        assert _read(os.path.join(tmp, RESULTS_FILE)) == results_before
        assert _read(os.path.join(tmp, SUMMARY_FILE)) == summary_before
        print("  ✓ resume recomputes nothing and reproduces the outputs")

        more = run_experiment(_config(tmp, resume=True, seeds=3))
        assert more.computed == 3 and more.skipped == 6
        assert len(read_manifest(tmp)) == 9
        print("  ✓ raising seeds computes only the new units")


def test_worker_independence():
    print("=" * 60)
    print("TEST: Results do not depend on the worker count")
    print("=" * 60)

    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        run_experiment(_config(a, workers=1))
        run_experiment(_config(b, workers=2))
        assert _read(os.path.join(a, RESULTS_FILE)) == _read(os.path.join(b, RESULTS_FILE))
        assert _read(os.path.join(a, SUMMARY_FILE)) == _read(os.path.join(b, SUMMARY_FILE))
    print("  ✓ byte-identical results and summary for 1 and 2 workers")


def test_unit_keys():
    print("=" * 60)
    print("TEST: Unit keys")
    print("=" * 60)

    cfg = _config("unused")
    assert unit_key(cfg, 2, 0) == unit_key(_config("elsewhere", workers=8), 2, 0)
    assert unit_key(cfg, 2, 0) != unit_key(cfg, 2, 1)
    assert unit_key(cfg, 2, 0) != unit_key(_config("unused", lam=0.4), 2, 0)
    print("  ✓ keys ignore output and workers, follow inputs")

    with pytest.raises(ConfigError):
        run_experiment(_config("unused", n_list=[4, 2]))
    print("  ✓ invalid config rejected before any output")


def test_gw_run():
    print("=" * 60)
    print("TEST: Galton-Watson run")
    print("=" * 60)

    with tempfile.TemporaryDirectory() as tmp:
        cfg = _config(tmp, model=ModelConfig(model="gw", nu={1: 0.5, 2: 0.5}), n_list=[1, 2, 3])
        result = run_experiment(cfg)
        assert result.computed == 6
        summary = result.summary
        assert summary["rate"]["family"] == "gw"
        assert len(summary["gw_trend"]) == 2
        assert "theta" not in summary
    print("  ✓ trees normalized by m^n with the generation trend")


def main():
    tests = [test_smoke_and_resume, test_worker_independence, test_unit_keys, test_gw_run]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError as e:
            failed += 1
            print(f"  ❌ {t.__name__} failed: {e}")
        print()
    print("=" * 60)
    print(f"{len(tests) - failed}/{len(tests)} passed")
    print("=" * 60)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
