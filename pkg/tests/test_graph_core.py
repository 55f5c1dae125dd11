#!/usr/bin/env python3
"""Test graph storage, components, restriction and the text format.

Run: python3 tests/test_graph_core.py
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from graphs.core import (
    BoxSpec,
    EmptyGraph,
    Graph,
    MalformedGraph,
    NoEmbedding,
    Provenance,
    UnknownVertex,
    box_restrict,
    box_vertices,
    connected_components,
    induced_subgraph,
    is_connected,
    maximal_component,
    metric_diameter,
)
from graphs.lattice import lattice_coords, lattice_edges, num_lattice_edges, site_index
from graphs.percolation import gen_bond_percolation
from graphs.serialize import GraphFormatError, dumps_graph, loads_graph
from graphs.union_find import UnionFind, label_components
from graphs.zoo import cycle_graph, path_graph, star_graph


def test_canonical_edges():
    print("=" * 60)
    print("TEST: Edge canonicalization")
    print("=" * 60)

    g = Graph(4, [(2, 1), (0, 1), (3, 2)])
    assert g.edges.tolist() == [[0, 1], [1, 2], [2, 3]]
    assert g.num_edges == 3
    assert g.degrees.tolist() == [1, 2, 2, 1]
    assert sorted(g.neighbors(2).tolist()) == [1, 3]
    print("  ✓ edges sorted with u < v, CSR degrees match")

    with pytest.raises(MalformedGraph):
        Graph(3, [(1, 1)])
    with pytest.raises(MalformedGraph):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(MalformedGraph):
        Graph(2, [(0, 5)])
    print("  ✓ loops, duplicates and out-of-range ids rejected")


def test_components_and_ties():
    print("=" * 60)
    print("TEST: Components and the maximal-component tie rule")
    print("=" * 60)

    # {0,3} and {1,2} both of size 2, plus isolated 4
    g = Graph(5, [(0, 3), (1, 2)])
    comps = connected_components(g)
    assert [c.vertices.tolist() for c in comps] == [[0, 3], [1, 2], [4]]
    assert maximal_component(g).vertices.tolist() == [0, 3]
    print("  ✓ equal sizes resolve to the smallest vertex id")

    labels = label_components(5, g.edges)
    assert labels.tolist() == [0, 1, 1, 0, 4]
    print("  ✓ labels are component minima")

    with pytest.raises(EmptyGraph):
        maximal_component(Graph(0, []))
    assert not is_connected(Graph(0, []))
    assert is_connected(path_graph(5))
    assert not is_connected(g)
    print("  ✓ empty graph and connectivity")


def test_union_find():
    print("=" * 60)
    print("TEST: Union-find")
    print("=" * 60)

    uf = UnionFind(6)
    assert uf.union(0, 1)
    assert uf.union(2, 3)
    assert not uf.union(1, 0)
    assert uf.union(1, 3)
    assert uf.connected(0, 2)
    assert not uf.connected(0, 5)
    assert uf.set_size(3) == 4
    assert uf.num_sets == 3
    print("  ✓ union by size, connectivity and set sizes")


def test_induced_subgraph():
    print("=" * 60)
    print("TEST: Induced subgraph relabelling")
    print("=" * 60)

    g = cycle_graph(6)
    sub = induced_subgraph(g, [5, 0, 1, 3])
    # parent ids 0,1,3,5 -> 0,1,2,3; edges 0-1, 0-5
    assert sub.num_vertices == 4
    assert sub.edges.tolist() == [[0, 1], [0, 3]]
    print("  ✓ ids relabelled in increasing parent order")

    with pytest.raises(UnknownVertex):
        induced_subgraph(g, [0, 9])
    print("  ✓ unknown vertex rejected")


def test_restriction_properties():
    print("=" * 60)
    print("TEST: Induced subgraph and box restriction properties")
    print("=" * 60)

    rng = np.random.default_rng(8)
    for seed in range(20):
        g = gen_bond_percolation(BoxSpec(5, 2), 0.6, seed)
        keep = np.flatnonzero(rng.random(g.num_vertices) < 0.5)
        sub = induced_subgraph(g, keep)
        assert induced_subgraph(sub, range(sub.num_vertices)) == sub
        assert induced_subgraph(g, range(g.num_vertices)) == g

        prev_ids = np.empty(0, dtype=np.int64)
        prev = None
        for m in range(1, 6):
            ids = box_vertices(g, BoxSpec(m, 2))
            inner = box_restrict(g, BoxSpec(m, 2))
            assert np.isin(prev_ids, ids).all()
            assert inner.num_vertices == len(ids) >= len(prev_ids)
            assert box_restrict(box_restrict(g, BoxSpec(5, 2)), BoxSpec(m, 2)) == inner
            if prev is not None:
                assert box_restrict(inner, BoxSpec(m - 1, 2)) == prev
                assert prev.num_edges <= inner.num_edges
            prev_ids, prev = ids, inner
        assert prev == g
    print("  ✓ induced subgraph is idempotent over 20 samples")
    print("  ✓ box restriction is monotone and nested in the scale")


def test_lattice_box():
    print("=" * 60)
    print("TEST: Lattice boxes and restriction")
    print("=" * 60)

    n, d = 3, 2
    coords = lattice_coords(n, d)
    edges = lattice_edges(n, d)
    assert len(coords) == (2 * n) ** d
    assert len(edges) == num_lattice_edges(n, d) == 2 * (2 * n) * (2 * n - 1)
    assert site_index(coords, n).tolist() == list(range(len(coords)))
    print("  ✓ box has (2n)^d sites and 2(2n)(2n-1) edges in d=2")

    g = Graph(len(coords), edges, coords, Provenance.of("bond", 0, n, {"d": d, "p": 1.0}))
    small = BoxSpec(1, 2)
    ids = box_vertices(g, small)
    assert len(ids) == 4
    sub = box_restrict(g, small)
    assert sub.num_vertices == 4 and sub.num_edges == 4
    assert np.array_equal(sub.coords, g.coords[ids])
    print("  ✓ B_1 restriction is the unit square")

    assert metric_diameter(g) == (5.0, True)
    assert maximal_component(g).metric_diameter == 5.0
    with pytest.raises(NoEmbedding):
        metric_diameter(star_graph(3))
    print("  ✓ l-infinity diameter equals coordinate spread")

    cont = BoxSpec(2, 2, "continuum")
    mask = cont.contains(np.array([[2.0, -2.0], [2.01, 0.0]]))
    assert mask.tolist() == [True, False]
    print("  ✓ continuum box is closed [-n, n]")


def test_text_format():
    print("=" * 60)
    print("TEST: Graph text format")
    print("=" * 60)

    prov = Provenance.of("rgg", 12345678901234567890, 2, {"d": 2, "R": 1.5})
    pts = np.array([[0.1, -0.25], [0.3, 1.0 / 3.0], [-1.5, 1.75]])
    g = Graph(3, [(0, 1)], pts, prov)
    text = dumps_graph(g)
    assert text.splitlines()[0].startswith("d 2 n 2 model rgg seed 12345678901234567890")
    back = loads_graph(text)
    assert back == g
    assert back.coords[1, 1] == 1.0 / 3.0
    print("  ✓ float coordinates and u64 seed survive exactly")

    lat = Graph(2, [(0, 1)], np.array([[0, 0], [1, 0]]), Provenance.of("bond", 7, 1, {"d": 2, "p": 0.5}))
    back = loads_graph(dumps_graph(lat))
    assert back.is_lattice and back == lat
    print("  ✓ integer embedding stays integer")

    with pytest.raises(GraphFormatError):
        loads_graph("d 2 n 1 model bond seed 0\ne 0 1\n")
    print("  ✓ edge to an undeclared vertex rejected")


def main():
    tests = [
        test_canonical_edges,
        test_components_and_ties,
        test_union_find,
        test_induced_subgraph,
        test_restriction_properties,
        test_lattice_box,
        test_text_format,
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
