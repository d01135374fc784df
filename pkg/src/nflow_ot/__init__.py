"""Exact multi-marginal cyclical monotonicity checks and N-flow calculus."""

from .cost import (
    CostFn,
    CounterexampleCost,
    FSpec,
    TableCost,
    UndefinedIntegralError,
    counterexample_cost,
    evaluate,
    integrate_plan,
)
from .counterexample import (
    VerificationReport,
    build_family,
    check_f_condition,
    exact_cost_gap,
    verify_counterexample,
)
from .decompose import (
    Loop2,
    SmirnovParts,
    decompose_closed_2flow,
    is_acyclic,
    max_cycle_subflow,
    smirnov_decompose,
)
from .lp import LinearProgram, LpOutcome, solve_lp, solve_transport
from .measures import AtomicMeasure, Plan, combine, marginal, marginals, symmetrize
from .monotonicity import (
    BudgetExceededError,
    MonotonicityVerdict,
    check_monotone_lp,
    check_monotone_permutations,
)
from .nflow import (
    BoundaryVector,
    NFlow,
    NGraph,
    associated_ngraph,
    boundary,
    find_finite_closed_flow,
    integrate_flow,
    is_closed,
    is_subflow,
    mass,
)
from .scalars import INF

__version__ = "0.1.0"
