"""Overload cascades with local load sharing on uncorrelated networks."""

from .engine import (
    CascadeConfig,
    CascadeOutcome,
    LoadProfile,
    assign_loads,
    classify_independent_absorbing,
    empirical_absorbing_fraction,
    run_cascade,
)
from .errors import ConfigError, EdgeListError, SolverDivergence, ThresholdNotFound
from .experiment import (
    SweepConfig,
    SweepRecord,
    TransitionEstimate,
    emit_csv,
    emit_svg_plot,
    estimate_transition,
    read_csv,
    run_sweep,
    threshold_command,
)
from .netgen import (
    DegreeStats,
    Network,
    degree_stats,
    gen_ba,
    gen_er,
    giant_component,
    load_edge_list,
    poisson_degree_stats,
    save_edge_list,
)
from .theory import (
    AbsorbingSolution,
    ThresholdReport,
    UniformCdf,
    a_k_given_sigma,
    absorbing_probabilities,
    branching_factor,
    cond1_bound,
    find_alpha_c,
    phi,
    solve_sigma,
)

__version__ = "0.1.0"
