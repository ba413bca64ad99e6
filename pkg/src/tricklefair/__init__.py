"""Transmission-load fairness toolkit for steady-state Trickle networks.

Three pillars: an analytic per-node transmission-probability model that
supports a different redundancy constant on every node, an independent
discrete-event simulator used to validate the model, and a local heuristic
that picks each node's redundancy constant from its neighbor count to even
out the broadcast load.
"""

__version__ = "0.1.0"

from .metrics import (
    Comparison,
    FairnessReport,
    class_means,
    compare,
    export_surface,
    fairness,
)
from .model import (
    MAX_DEGREE,
    ModelSolution,
    SolverConfig,
    YtDistribution,
    expected_message_count,
    gamma_exact,
    p_first,
    p_last_opportunity,
    solve_fixed_point,
    subset_cdf_average,
    update_map,
    yt_pmf,
)
from .redundancy import (
    DEFAULT_OFFSET,
    DEFAULT_STEP,
    KAssignment,
    assign_k,
    calculate_k,
    fixed_policy,
    heuristic_policy,
)
from .simulator import (
    SimulationResult,
    TraceEvent,
    TrickleParams,
    estimate_probabilities,
    run_steady_state,
)
from .topology import (
    Topology,
    TopologyError,
    generate_grid,
    generate_random_udg,
    load_topology,
    save_topology,
)

__all__ = [
    "MAX_DEGREE",
    "DEFAULT_OFFSET",
    "DEFAULT_STEP",
    "Comparison",
    "FairnessReport",
    "KAssignment",
    "ModelSolution",
    "SimulationResult",
    "SolverConfig",
    "Topology",
    "TopologyError",
    "TraceEvent",
    "TrickleParams",
    "YtDistribution",
    "assign_k",
    "calculate_k",
    "class_means",
    "compare",
    "estimate_probabilities",
    "expected_message_count",
    "export_surface",
    "fairness",
    "fixed_policy",
    "gamma_exact",
    "generate_grid",
    "generate_random_udg",
    "heuristic_policy",
    "load_topology",
    "p_first",
    "p_last_opportunity",
    "run_steady_state",
    "save_topology",
    "solve_fixed_point",
    "subset_cdf_average",
    "update_map",
    "yt_pmf",
]
