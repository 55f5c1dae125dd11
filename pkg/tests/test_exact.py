#!/usr/bin/env python3
"""Test the exact extinction-time solver on small graphs.

Run: python3 tests/test_exact.py
"""

import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest
import scipy.io

from config import ContactConfig
from contact.exact import (
    TooManyVertices,
    absorption_system,
    dump_system,
    exact_expected_extinction,
)
from contact.simulator import BadRates
from contact.trials import estimate_mean_extinction
from estimators import uniform_bound_check
from graphs.core import EmptyGraph, Graph
from graphs.zoo import complete_graph, cycle_graph, path_graph, star_graph, zoo


def test_hand_values():
    print("=" * 60)
    print("TEST: Closed-form extinction times")
    print("=" * 60)

    assert exact_expected_extinction(path_graph(1), 5.0) == pytest.approx(1.0, rel=1e-12)
    print("  ✓ single vertex: E[tau] = 1 for any rate")

    # P2, lam=2: h1 = (1 + 2 h12) / 3, h12 = 1/2 + h1 -> h1 = 2, h12 = 5/2
    assert exact_expected_extinction(path_graph(2), 2.0) == pytest.approx(2.5, rel=1e-10)
    assert exact_expected_extinction(path_graph(2), 2.0, initial=[1]) == pytest.approx(2.0, rel=1e-10)
    print("  ✓ P2 at lam=2: 5/2 from both infected, 2 from one")

    assert exact_expected_extinction(path_graph(3), 0.0) == pytest.approx(11 / 6, rel=1e-10)
    print("  ✓ P3 at lam=0: H_3 = 11/6")

    assert exact_expected_extinction(path_graph(3), 1.0, initial=[]) == 0.0
    print("  ✓ empty initial set has extinction time 0")


def test_lambda_zero_harmonic():
    print("=" * 60)
    print("TEST: lam=0 gives the harmonic number on any graph")
    print("=" * 60)

    for name, g in zoo().items():
        harmonic = sum(1 / k for k in range(1, g.num_vertices + 1))
        assert exact_expected_extinction(g, 0.0) == pytest.approx(harmonic, rel=1e-10), name
    print("  ✓ E[tau] = H_|V| on every zoo graph")


def test_monotone_in_rate_and_graph():
    print("=" * 60)
    print("TEST: Exact means increase with the rate and the graph")
    print("=" * 60)

    for name, g in zoo().items():
        values = [exact_expected_extinction(g, lam) for lam in (0.5, 1.0, 2.0)]
        assert values == sorted(values), name
    print("  ✓ nondecreasing in lam on every zoo graph")

    assert exact_expected_extinction(path_graph(4), 1.5) <= exact_expected_extinction(cycle_graph(4), 1.5)
    assert exact_expected_extinction(cycle_graph(4), 1.5) <= exact_expected_extinction(complete_graph(4), 1.5)
    print("  ✓ P4 <= C4 <= K4 at lam=1.5")


def test_uniform_bound():
    print("=" * 60)
    print("TEST: log E[tau] <= |V| + 2 lam |E|")
    print("=" * 60)

    for name, g in zoo().items():
        for lam in (0.5, 2.0, 4.0):
            check = uniform_bound_check(g, lam)
            assert check.holds, f"{name} lam={lam}: {check}"
    print("  ✓ bound holds on the zoo at lam in {0.5, 2, 4}")


def test_agrees_with_monte_carlo():
    print("=" * 60)
    print("TEST: Exact solver vs simulation")
    print("=" * 60)

    for g, lam in ((star_graph(4), 1.0), (cycle_graph(4), 1.5)):
        exact = exact_expected_extinction(g, lam)
        est = estimate_mean_extinction(g, ContactConfig(lam=lam, time_cap=None), 4000, 3)
        assert abs(est.mean - exact) < 4 * est.std_error, f"{est.mean} vs {exact}"
        print(f"  ✓ |V|={g.num_vertices} lam={lam}: MC {est.mean:.3f} ~ exact {exact:.3f}")


def test_system_and_errors():
    print("=" * 60)
    print("TEST: Absorption system dump and input errors")
    print("=" * 60)

    g = path_graph(3)
    A = absorption_system(g, 1.0)
    assert A.shape == (7, 7)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "system.mtx")
        dump_system(g, 1.0, path)
        back = scipy.io.mmread(path).tocsr()
    assert abs(back - A).max() == 0
    print("  ✓ Matrix Market dump reproduces the system")

    with pytest.raises(TooManyVertices):
        exact_expected_extinction(Graph(21, []), 1.0)
    with pytest.raises(EmptyGraph):
        exact_expected_extinction(Graph(0, []), 1.0)
    with pytest.raises(BadRates):
        exact_expected_extinction(g, -0.1)
    print("  ✓ 21 vertices, empty graph and negative rate rejected")


def main():
    tests = [
        test_hand_values,
        test_lambda_zero_harmonic,
        test_monotone_in_rate_and_graph,
        test_uniform_bound,
        test_agrees_with_monte_carlo,
        test_system_and_errors,
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
