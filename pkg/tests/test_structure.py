#!/usr/bin/env python3
"""Test component census, uniqueness, annulus crossings, density and MSTs.

Run: python3 tests/test_structure.py
"""

import csv
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from config import ModelConfig
from graphs.core import Graph, NoEmbedding, NotConnected
from graphs.registry import generate
from graphs.zoo import complete_graph, path_graph, star_graph
from structure import (
    CENSUS_FIELDS,
    AnnulusSpec,
    BadAnnulus,
    BadEpsilon,
    annulus_crossing_components,
    census_over_seeds,
    census_summary,
    component_census,
    density_series,
    infinite_cluster_proxy,
    mst_degree_check,
    proof_scale,
    rgg_component_report,
    scipy_mst_length,
    shell_thickness,
    tree_length,
    uniqueness_event,
    write_census_csv,
)

FULL = ModelConfig(model="bond", d=2, p=1.0)
EMPTY = ModelConfig(model="bond", d=2, p=0.0)


def test_census():
    print("=" * 60)
    print("TEST: Component census")
    print("=" * 60)

    report = component_census(generate(FULL, 4, 0), 4, 0.5)
    assert report.shell == shell_thickness(4, 0.5) == 2
    assert len(report.rows) == 1
    row = report.rows[0]
    assert row.rank == 1 and row.size == 64 and row.diameter == 7.0 and not row.in_boundary_shell
    assert report.verdict_unique_giant and report.verdict_others
    print("  ✓ p=1: one giant of diameter 2n-1")

    report = component_census(generate(EMPTY, 4, 0), 4, 0.5)
    assert len(report.rows) == 64
    assert all(r.size == 1 and r.diameter == 0.0 for r in report.rows)
    assert [r.rank for r in report.rows] == list(range(1, 65))
    assert not report.verdict_unique_giant and report.verdict_others
    assert report.recompute() == (False, True)
    print("  ✓ p=0: 64 singletons, no giant")

    with pytest.raises(BadEpsilon):
        component_census(generate(FULL, 4, 0), 4, 1.0)
    with pytest.raises(NoEmbedding):
        component_census(star_graph(3), 2, 0.5)
    print("  ✓ epsilon outside (0,1) and unembedded graphs rejected")


def test_supercritical_census():
    print("=" * 60)
    print("TEST: Census in the supercritical regime")
    print("=" * 60)

    model = ModelConfig(model="bond", d=2, p=0.9)
    reports = census_over_seeds(model, 32, 10, 0.75, master_seed=5)
    for report in reports:
        assert report.verdict_unique_giant and report.verdict_others, report.seed
        assert report.recompute() == (True, True)
        assert report.rows[0].size > 32 ** 1.25
        assert report.rows[0].diameter == 63.0
        assert all(r.size < 32 ** 0.75 for r in report.rows[1:] if not r.in_boundary_shell)
    print(f"  ✓ p=0.9, n=32: one giant spanning the box in all {len(reports)} seeds")


def test_census_over_seeds():
    print("=" * 60)
    print("TEST: Census across seeds")
    print("=" * 60)

    model = ModelConfig(model="bond", d=2, p=0.7)
    serial = census_over_seeds(model, 4, 4, 0.5, master_seed=3, workers=1)
    parallel = census_over_seeds(model, 4, 4, 0.5, master_seed=3, workers=2)
    assert serial == parallel
    print("  ✓ reports identical for 1 and 2 workers")

    summary = census_summary(serial)
    assert summary["samples"] == 4 and 0.0 <= summary["both_fraction"] <= 1.0
    assert census_summary([]) == {"samples": 0}

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "census.csv")
        write_census_csv(path, serial)
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            rows = list(reader)
            assert tuple(reader.fieldnames) == CENSUS_FIELDS
    assert len(rows) == sum(len(r.rows) for r in serial)
    print(f"  ✓ {len(rows)} census rows written")


def test_uniqueness_and_proxy():
    print("=" * 60)
    print("TEST: Uniqueness event and the large-cluster proxy")
    print("=" * 60)

    assert uniqueness_event(FULL, 3, 0)
    print("  ✓ p=1: uniqueness holds")

    report = infinite_cluster_proxy(generate(FULL, 8, 0), 4, 0.5)
    assert report.maximal_size == 64 and report.large_part_size == 64
    assert report.symmetric_difference == 0 and report.holds
    print("  ✓ p=1: the two clusters agree exactly")

    with pytest.raises(NoEmbedding):
        uniqueness_event(ModelConfig(model="gw"), 3, 0)


def test_annulus():
    print("=" * 60)
    print("TEST: Annulus crossings")
    print("=" * 60)

    spec = AnnulusSpec((0, 0), 4)
    assert spec.inner_scale == 1
    assert annulus_crossing_components(generate(FULL, 8, 0), spec) == 1
    assert annulus_crossing_components(generate(EMPTY, 8, 0), spec) == 0
    print("  ✓ full box crosses once, empty box never")

    assert annulus_crossing_components(path_graph(12), AnnulusSpec((0,), 4)) == 1
    print("  ✓ a straight path crosses once")

    assert proof_scale(16, 0.5, 2) == 4
    assert proof_scale(10 ** 6, 0.5, 2) == 15

    with pytest.raises(BadAnnulus):
        AnnulusSpec((0, 0), 3)
    with pytest.raises(NoEmbedding):
        annulus_crossing_components(star_graph(4), spec)
    print("  ✓ scale below 4 and unembedded graphs rejected")


def test_density():
    print("=" * 60)
    print("TEST: Density series")
    print("=" * 60)

    rows = density_series(FULL, [2, 3], 2)
    assert [r.n for r in rows] == [2, 3]
    assert all(r.mean == 1.0 and r.variance == 0.0 for r in rows)
    print("  ✓ p=1: |G_n| = |B_n| at every scale")


def test_mst():
    print("=" * 60)
    print("TEST: Minimum spanning trees")
    print("=" * 60)

    coords = np.array([[0.0, 0.0], [3.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    g = Graph(4, complete_graph(4).edges, coords)
    max_degree, tree = mst_degree_check(g)
    assert max_degree == 2 and tree.num_edges == 3
    assert tree_length(tree) == pytest.approx(3.0)
    assert scipy_mst_length(g) == pytest.approx(3.0)
    print("  ✓ collinear points: the MST is the path")

    single = Graph(1, [], np.zeros((1, 2)))
    assert mst_degree_check(single)[0] == 0
    print("  ✓ single vertex has degree 0")

    rng = np.random.default_rng(1)
    pts = rng.uniform(-3, 3, size=(40, 2))
    iu = np.triu_indices(40, k=1)
    dense = Graph(40, np.stack(iu, axis=1), pts)
    max_degree, tree = mst_degree_check(dense)
    assert max_degree <= 6
    assert tree_length(tree) == pytest.approx(scipy_mst_length(dense), rel=1e-12)
    print(f"  ✓ random planar points: max degree {max_degree} <= 6, length matches csgraph")

    with pytest.raises(NotConnected):
        mst_degree_check(Graph(2, [], np.zeros((2, 2))))


def test_rgg_report():
    print("=" * 60)
    print("TEST: Geometric component report")
    print("=" * 60)

    report = rgg_component_report(generate(FULL, 4, 0), 4)
    assert report.maximal_size == 64 and report.maximal_diameter == 7.0
    assert report.diameter_ok and report.others_ok
    print("  ✓ spanning component with no others")


def main():
    tests = [
        test_census,
        test_supercritical_census,
        test_census_over_seeds,
        test_uniqueness_and_proxy,
        test_annulus,
        test_density,
        test_mst,
        test_rgg_report,
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
