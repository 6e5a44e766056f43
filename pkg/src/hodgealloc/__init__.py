"""Reward allocation for cooperative games on weighted graphs.

The library computes fair allocations two independent ways: by solving the
graph Poisson equation d*d v_i = d* f_i for each player's contribution flow
f_i, and by Monte Carlo estimation of the expected path integral of f_i
along the canonical reversible random walk. The two coincide, which the
test suite exercises heavily. Coalition lattices, the classical Shapley
value, and the Kohlberg-Neyman value for strategic games are built on top.
"""

from .errors import (
    AllPathsTruncated,
    AntisymmetryViolated,
    DimensionMismatch,
    Disconnected,
    DuplicateAnchor,
    DuplicateEdge,
    DuplicateState,
    HodgeAllocError,
    InvalidEdge,
    IsolatedState,
    LPNumericalFailure,
    MissingAnchor,
    MissingNullState,
    NonpositiveWeight,
    NonzeroNullValue,
    NotAnEdge,
    NotAWalk,
    ParseError,
    PlayerOutOfRange,
    SelfLoop,
    SolverDidNotConverge,
    TooLarge,
    TruncatedPath,
    UnreachableTarget,
    ValidationError,
)
from .graph import (
    ContributionProfile,
    CooperationGraph,
    EdgeFlow,
    GameValues,
    component_ids,
    connected_components,
    flow_value,
    validate_graph,
)
from .calculus import (
    divergence,
    gradient,
    hodge_decompose,
    inner_product_flows,
    inner_product_states,
    laplacian_apply,
)
from .poisson import (
    ComponentGameSolution,
    SolverConfig,
    component_allocation,
    expected_revenue,
    mid_project_revenue,
    solve_poisson,
)
from .markov import (
    SampledPath,
    TransitionKernel,
    ValueEstimate,
    build_kernel,
    estimate_value,
    loop_probability,
    path_integral,
    sample_path,
    stationary_distribution,
)
from .hypercube import (
    CoalitionGame,
    build_hypercube,
    build_inclusion_graph,
    classic_profile,
    coalition_label,
    equal_split_flow,
    extended_profile,
    glove_game,
    hypercube_game_values,
    parse_coalition_label,
    partial_flow_classic,
    partial_flow_extended,
    shapley_closed_form,
    shapley_permutation,
    shapley_values,
)
from .strategic import (
    StrategicGame,
    ThreatProfile,
    coalition_game_from_threats,
    kn_dynamic_extension,
    kn_value,
    kn_value_by_orderings,
    threat_power,
    threat_profile,
    zero_sum_value,
)
from .fileio import (
    graph_spec_dict,
    load_graph_spec,
    load_strategic_spec,
    save_graph_spec,
    save_strategic_spec,
)

__version__ = "0.1.0"
