"""Expectiled utility: Gul's disappointment aversion through expectiles."""

from .core import (
    Agent,
    DisappointmentSet,
    Dominance,
    FiniteSpace,
    MissingOutcomeError,
    ModelError,
    OutcomeAct,
    Scenario,
    SpaceMismatchError,
    UtilityAct,
    apply_utility,
    disappointment_set,
    distribution,
    fosd_compare,
)
from .solvers import (
    ConvergenceError,
    ConvergenceTrace,
    CrossCheckError,
    SolverConfig,
    als_minimize,
    balance_gap,
    binary_closed_form,
    expectile,
    expectile_balance,
    gul_fixed_point,
    iterative_reweighting,
    loss,
    solve_all,
)
from .dual import (
    brute_force_dual,
    event_scenario,
    event_table,
    optimal_scenario,
    scenario_in_density_set,
    scenario_value,
)
from .axioms import (
    PreconditionError,
    PropertyReport,
    check_disappointment_hedging,
    check_disappointment_stacking,
    fingerprint_functional,
    gen_act_with_disappointment_set,
    infer_beta,
    run_property,
)
from .preferences import (
    beta_sweep,
    certainty_equivalent,
    compare_agents,
    evaluate,
    midpoint_value,
    rank,
)

__version__ = "0.1.0"
