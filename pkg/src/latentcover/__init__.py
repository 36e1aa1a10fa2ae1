"""Minimal latent causal models from nonparametric dependence structure.

The library estimates which measured variables are statistically dependent
(distance correlation + permutation tests), covers the resulting undirected
dependency graph with a provably minimum set of cliques, and turns the
cover into a bipartite latent-to-measurement causal DAG with structural
analyses on top.
"""

from .analysis import (
    SyntheticModel,
    cycle_chord_structure,
    indegree_histogram,
    outdegree_histogram,
    shared_latents_matrix,
    shared_measurements_matrix,
    simulate,
    synthetic_from_mcm,
    triangle_tail_structure,
)
from .ecc import (
    BudgetExceededError,
    CoverVerification,
    SolverBudget,
    brute_force_ecc,
    min_assignment_ecc,
    min_clique_ecc,
    verify_cover,
)
from .graph import (
    Clique,
    EdgeCliqueCover,
    FragilePair,
    InstanceKind,
    Objective,
    UndirectedDependencyGraph,
    from_adjacency,
    from_edge_list,
    format_dense,
    format_edge_list,
    generate_instance,
    is_clique,
    load_graph,
    maximal_cliques,
    parse_graph,
)
from .independence import (
    ConditionalRelation,
    IndependenceTestReport,
    PairResult,
    SampleMatrix,
    derive_conditional_relations,
    distance_correlation,
    estimate_udg,
    permutation_pvalue,
)
from .mcm import (
    GeneralDag,
    McmValidation,
    MeDILCausalModel,
    PipelineResult,
    build_mcm,
    d_separated,
    induced_udg,
    induces_all_dependencies,
    is_observationally_consistent,
    run_pipeline,
    validate_mcm,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "Clique",
    "ConditionalRelation",
    "CoverVerification",
    "EdgeCliqueCover",
    "FragilePair",
    "GeneralDag",
    "IndependenceTestReport",
    "InstanceKind",
    "McmValidation",
    "MeDILCausalModel",
    "Objective",
    "PairResult",
    "PipelineResult",
    "SampleMatrix",
    "SolverBudget",
    "SyntheticModel",
    "UndirectedDependencyGraph",
    "brute_force_ecc",
    "build_mcm",
    "cycle_chord_structure",
    "d_separated",
    "derive_conditional_relations",
    "distance_correlation",
    "estimate_udg",
    "from_adjacency",
    "from_edge_list",
    "format_dense",
    "format_edge_list",
    "generate_instance",
    "indegree_histogram",
    "induced_udg",
    "induces_all_dependencies",
    "is_clique",
    "is_observationally_consistent",
    "load_graph",
    "maximal_cliques",
    "min_assignment_ecc",
    "min_clique_ecc",
    "outdegree_histogram",
    "parse_graph",
    "permutation_pvalue",
    "run_pipeline",
    "shared_latents_matrix",
    "shared_measurements_matrix",
    "simulate",
    "synthetic_from_mcm",
    "triangle_tail_structure",
    "validate_mcm",
    "verify_cover",
]
