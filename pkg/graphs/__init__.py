"""Finite graphs and the random graph ensembles the contact process runs on.

Example:
    from graphs import BoxSpec, gen_bond_percolation, maximal_component

    g = gen_bond_percolation(BoxSpec(16, 2), p=0.7, seed=1)
    giant = maximal_component(g)
    print(giant.size, giant.metric_diameter)
"""

from graphs.core import (
    BadDimension,
    BadParameter,
    BoxSpec,
    Component,
    EmptyGraph,
    GeneratorError,
    Graph,
    GraphError,
    MalformedGraph,
    NoEmbedding,
    NotConnected,
    Provenance,
    UnknownVertex,
    box_restrict,
    box_vertices,
    component_labels,
    connected_components,
    induced_subgraph,
    is_connected,
    maximal_component,
    metric_diameter,
)
from graphs.gff import GFFSample, gen_gff_excursion, sample_gff_field
from graphs.gw import GWRecord, ConditioningExhausted, ImpossibleConditioning, gen_gw_tree
from graphs.interlacements import InterlacementSample, KillRadiusTooSmall, gen_interlacements
from graphs.percolation import PercolationSample, gen_bond_percolation, gen_site_percolation
from graphs.potential import TooLarge
from graphs.rgg import RGGSample, gen_rgg
from graphs.serialize import dump_graph, dumps_graph, load_graph, loads_graph

__all__ = [
    "BadDimension", "BadParameter", "BoxSpec", "Component", "EmptyGraph", "GeneratorError",
    "Graph", "GraphError", "MalformedGraph", "NoEmbedding", "NotConnected", "Provenance",
    "UnknownVertex", "box_restrict", "box_vertices", "component_labels", "connected_components",
    "induced_subgraph", "is_connected", "maximal_component", "metric_diameter",
    "GFFSample", "gen_gff_excursion", "sample_gff_field",
    "GWRecord", "ConditioningExhausted", "ImpossibleConditioning", "gen_gw_tree",
    "InterlacementSample", "KillRadiusTooSmall", "gen_interlacements",
    "PercolationSample", "gen_bond_percolation", "gen_site_percolation",
    "TooLarge", "RGGSample", "gen_rgg",
    "dump_graph", "dumps_graph", "load_graph", "loads_graph",
]
