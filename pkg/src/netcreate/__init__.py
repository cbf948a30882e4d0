"""Exact engine for the network creation game: costs, equilibria, exhaustive
price of anarchy at small n, and structural audits of equilibria."""

from .constructions import (
    CliqueLeavesSpec,
    counterexample_cost_exact,
    make_clique,
    make_clique_with_leaves,
    make_random_profile,
    make_star,
    poa_lower_bound_asymptote,
    poa_upper_bound_formula,
)
from .core import (
    INFINITE,
    UNREACHABLE,
    CostReport,
    DistanceMatrix,
    GameParams,
    NetworkGraph,
    StrategyProfile,
    all_pairs_distances,
    build_graph,
    parse_alpha,
    profile_from_json,
    social_cost,
    social_optimum_cost,
    vertex_cost,
)
from .enumeration import (
    PoaResult,
    brute_force_optimum,
    decode,
    encode,
    enumerate_equilibria,
    enumerate_profiles,
    poa_sweep,
    price_of_anarchy_exact,
)
from .equilibria import (
    DeviationWitness,
    NashVerdict,
    addition_convexity_check,
    best_response_dynamics,
    best_response_exact,
    deviation_cost,
    improving_move_heuristic,
    is_nash,
    random_restart_strategy,
)
from .errors import LimitExceeded, NetCreateError, PreconditionError, SchemaError, SearchExhausted
from .structure import LayerPartition, LemmaAuditReport, children_map, diameter, layer_partition, lemma_audit

__version__ = "0.1.0"
