"""Non-adaptive group testing with inhibitors.

Random i.i.d. pooling designs, threshold decoders for the exact and
upper-bound-only settings, closed-form test counts, entropy lower bounds,
brute-force oracles and a seeded Monte Carlo harness.
"""

from .bounds import (
    LowerBoundReport,
    PoolSizeAnalysis,
    fano_lb_dcp,
    fano_lb_scp,
    fano_lb_ub_scenario,
    g_opt_search,
    max_outcome_entropy,
    p_y,
    p_y_curve,
    switch_points,
)
from .complexity import (
    BetaBreakdown,
    ChernoffConditionError,
    beta_dcp,
    beta_dcp_ub,
    beta_exact,
    beta_exact_asymptotic,
    beta_ub,
    thumb_rule_tests,
)
from .decode import Classification, Label, classify_counts, decode_exact, decode_ub, defective_set
from .design import ExactParams, UbParams, exact_params, iid_design, substream, ub_params
from .harness import SweepSpec, TrialConfig, TrialReport, report_render, run_trials, sweep
from .model import (
    ItemStats,
    PoolingDesign,
    Population,
    all_item_stats,
    item_stats,
    participation_counts,
    simulate_outcomes,
)
from .oracle import ResourceLimitError, consistent_assignments, empirical_event_tail, empirical_p_y

__version__ = "0.1.0"
