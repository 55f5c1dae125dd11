"""Contact process: simulation, monotone couplings and the exact small-graph solver."""

from contact.exact import TooManyVertices, dump_system, exact_expected_extinction, exact_extinction_vector
from contact.simulator import (
    BadRates,
    ContactError,
    GraphicalRepresentation,
    TrialOutcome,
    coupled_simulate,
    coupled_subgraph_simulate,
    ks_exponential_distance,
    simulate_extinction,
)
from contact.trials import AllCensored, ExtinctionEstimate, estimate_mean_extinction, write_trial_dump

__all__ = [
    "TooManyVertices", "dump_system", "exact_expected_extinction", "exact_extinction_vector",
    "BadRates", "ContactError", "GraphicalRepresentation", "TrialOutcome", "coupled_simulate",
    "coupled_subgraph_simulate", "ks_exponential_distance", "simulate_extinction",
    "AllCensored", "ExtinctionEstimate", "estimate_mean_extinction", "write_trial_dump",
]
