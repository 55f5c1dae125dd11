#!/usr/bin/env python3
"""Test the contact-process simulator, its couplings and trial aggregation.

Run: python3 tests/test_contact.py
"""

import csv
import math
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from config import ContactConfig
from contact.simulator import (
    BadRates,
    GraphicalRepresentation,
    _Process,
    coupled_simulate,
    coupled_subgraph_simulate,
    ks_exponential_distance,
    simulate_extinction,
)
from contact.trials import AllCensored, estimate_mean_extinction, run_trials, summarize, write_trial_dump
from graphs.core import EmptyGraph, Graph
from graphs.zoo import cycle_graph, path_graph, star_graph, zoo


def test_single_vertex_is_exponential():
    print("=" * 60)
    print("TEST: Single vertex recovers at rate 1")
    print("=" * 60)

    g = path_graph(1)
    taus = [simulate_extinction(g, ContactConfig(lam=3.0), 5, i).tau for i in range(3000)]
    mean = float(np.mean(taus))
    assert abs(mean - 1.0) < 4 / math.sqrt(3000)
    print(f"  ✓ mean tau = {mean:.4f} ~ 1")

    dist = ks_exponential_distance(taus)
    assert dist < 1.63 / math.sqrt(3000)
    print(f"  ✓ KS distance to Exp(1) = {dist:.4f}")


def test_determinism_and_censoring():
    print("=" * 60)
    print("TEST: Seed paths and censoring")
    print("=" * 60)

    g = cycle_graph(5)
    cfg = ContactConfig(lam=1.5)
    a = simulate_extinction(g, cfg, 99, 7)
    b = simulate_extinction(g, cfg, 99, 7)
    c = simulate_extinction(g, cfg, 99, 8)
    assert a == b
    assert a.tau != c.tau
    assert a.seed_path == (99, 7)
    print("  ✓ (master_seed, trial_index) fixes the outcome")

    capped = simulate_extinction(g, ContactConfig(lam=1.5, time_cap=1e-9), 99, 7)
    assert capped.censored and capped.tau == 1e-9
    print("  ✓ outcome at the cap is censored with tau = cap")

    with pytest.raises(AllCensored):
        estimate_mean_extinction(g, ContactConfig(lam=1.5, time_cap=1e-9), 20, 0)
    print("  ✓ all-censored estimate raises")

    with pytest.raises(EmptyGraph):
        simulate_extinction(Graph(0), cfg, 0)
    with pytest.raises(BadRates):
        simulate_extinction(g, ContactConfig(lam=-1.0), 0)
    print("  ✓ empty graph and negative rate rejected")


def test_lambda_zero_is_coupon_collector():
    print("=" * 60)
    print("TEST: lambda = 0 extinction is a maximum of exponentials")
    print("=" * 60)

    g = star_graph(3)
    est = estimate_mean_extinction(g, ContactConfig(lam=0.0), 6000, 21)
    harmonic = sum(1 / k for k in range(1, 5))
    assert abs(est.mean - harmonic) < 4 * est.std_error
    print(f"  ✓ mean {est.mean:.4f} ~ H_4 = {harmonic:.4f}")


def test_monotone_couplings():
    print("=" * 60)
    print("TEST: Coupling in the rate and in the graph")
    print("=" * 60)

    for name, g in zoo().items():
        for t in range(300):
            outs = coupled_simulate(g, [0.5, 1.0, 2.0], 3, time_cap=None, trial_index=t)
            taus = [o.tau for o in outs]
            assert taus == sorted(taus), f"{name} trial {t}: {taus}"
            sub, full = coupled_subgraph_simulate(g, [0, 1], 2.0, 4, time_cap=None, trial_index=t)
            assert sub.tau <= full.tau, f"{name} trial {t}"
        print(f"  ✓ {name}: tau nondecreasing in lambda and in the graph")

    with pytest.raises(BadRates):
        coupled_simulate(path_graph(3), [2.0, 1.0], 0)
    with pytest.raises(BadRates):
        coupled_simulate(path_graph(3), [0.0, 1.0], 0)
    print("  ✓ unsorted or nonpositive rates rejected")


def test_coupled_marginal_matches_single():
    print("=" * 60)
    print("TEST: Dominating process of a coupling is the plain process")
    print("=" * 60)

    g = path_graph(4)
    for t in range(50):
        top = coupled_simulate(g, [0.5, 2.0], 8, time_cap=None, trial_index=t)[-1]
        alone = simulate_extinction(g, ContactConfig(lam=2.0, time_cap=None), 8, t)
        assert top.tau == alone.tau
    print("  ✓ same streams give the same largest-rate trajectory")


def test_event_recording():
    print("=" * 60)
    print("TEST: Recorded graphical representation")
    print("=" * 60)

    g = path_graph(3)
    rep = GraphicalRepresentation(g, 1.0, 12, record=True)
    proc = _Process(1.0, None, bytearray(b"\x01\x01\x01"), 3)
    rep.run([proc], None)
    assert proc.tau is not None and proc.count == 0
    times = [e[0] for e in rep.events]
    assert times == sorted(times)
    assert rep.events[-1][1] == "recover" and rep.events[-1][0] == proc.tau
    for _, kind, x, y, label in rep.events:
        if kind == "transmit":
            assert abs(x - y) == 1 and 0.0 <= label < 1.0
    print(f"  ✓ {len(rep.events)} events in time order, last one a recovery at tau")


def test_trials_independent_of_workers():
    print("=" * 60)
    print("TEST: Trial outcomes do not depend on worker count")
    print("=" * 60)

    g = path_graph(4)
    cfg = ContactConfig(lam=1.0)
    serial = run_trials(g, cfg, 40, 17, workers=1)
    parallel = run_trials(g, cfg, 40, 17, workers=2, chunk=7)
    assert serial == parallel
    assert [o.trial_index for o in serial] == list(range(40))
    print("  ✓ identical outcomes in trial order")

    est = summarize(serial)
    mean, se, censored = est
    assert censored == 0 and mean > 0 and se > 0
    print("  ✓ estimate unpacks as (mean, se, censored)")

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "trials.csv")
        write_trial_dump(path, serial)
        with open(path, newline="") as f:
            rows = list(csv.DictReader(f))
    assert len(rows) == 40
    assert float(rows[3]["tau"]) == serial[3].tau
    print("  ✓ trial dump round-trips tau exactly")


def main():
    tests = [
        test_single_vertex_is_exponential,
        test_determinism_and_censoring,
        test_lambda_zero_is_coupon_collector,
        test_monotone_couplings,
        test_coupled_marginal_matches_single,
        test_event_recording,
        test_trials_independent_of_workers,
    ]
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
