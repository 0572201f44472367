"""Fairness-constrained selection on integer score grids.

The library models an institution choosing whom to serve from two
groups whose outcomes feed back into their scores.  It provides the
single-step optimal and fairness-constrained policies (exact LP and
threshold-search forms), the price-of-fairness and price-of-simplicity
measurements, worst-case instance constructions, and a seeded
multi-step population simulator for the long-horizon policies.
"""

from .model import (
    TIE_TOL,
    AssumptionsReport,
    Category,
    CategoryStats,
    Economics,
    GroupDistribution,
    Instance,
    Policy,
    ScoreGrid,
    SuccessProb,
    ThresholdPolicy,
    assumptions_report,
    categorize,
    category_masks,
    expected_delta,
    expected_utility,
    is_alpha_fair,
    policy_value,
    post_means,
)
from .single_step import (
    FairSolution,
    OptimalSolution,
    PofReport,
    PosReport,
    SufficiencyReport,
    build_lb_general,
    build_lb_tv,
    fair_opt_lp,
    fair_opt_threshold,
    optimal_policy,
    price_of_fairness,
    price_of_simplicity,
    restrict_non_degrading,
    sufficient_condition_check,
    tv_distance,
)
from .simulate import (
    POLICY_KINDS,
    Agent,
    CascadeReport,
    Population,
    SimConfig,
    StepMetrics,
    Trajectory,
    advance,
    cascade_diagnostics,
    empirical_pof,
    make_population,
    run,
    select,
)
from .data_io import (
    load_group_csv,
    load_instance,
    save_instance,
    synth_gaussian,
    synth_geometric_failure,
)

__version__ = "0.1.0"

__all__ = [
    "TIE_TOL",
    "POLICY_KINDS",
    "Agent",
    "AssumptionsReport",
    "CascadeReport",
    "Category",
    "CategoryStats",
    "Economics",
    "FairSolution",
    "GroupDistribution",
    "Instance",
    "OptimalSolution",
    "PofReport",
    "Policy",
    "Population",
    "PosReport",
    "ScoreGrid",
    "SimConfig",
    "StepMetrics",
    "SuccessProb",
    "SufficiencyReport",
    "ThresholdPolicy",
    "Trajectory",
    "advance",
    "assumptions_report",
    "build_lb_general",
    "build_lb_tv",
    "cascade_diagnostics",
    "categorize",
    "category_masks",
    "empirical_pof",
    "expected_delta",
    "expected_utility",
    "fair_opt_lp",
    "fair_opt_threshold",
    "is_alpha_fair",
    "load_group_csv",
    "load_instance",
    "make_population",
    "optimal_policy",
    "policy_value",
    "post_means",
    "price_of_fairness",
    "price_of_simplicity",
    "restrict_non_degrading",
    "run",
    "save_instance",
    "select",
    "sufficient_condition_check",
    "synth_gaussian",
    "synth_geometric_failure",
    "tv_distance",
]
