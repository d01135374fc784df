"""The 3-marginal counterexample: a cyclically monotone plan that is not optimal.

On X = {1, 2, ...} with the cost of :func:`~nflow_ot.cost.counterexample_cost`:

    mu       = sum_k 2^-k d_k
    gamma    = sum_k 4^-k (d_(2k-1,2k-1,2k) + d_(2k-1,2k,2k-1) + d_(2k,2k-1,2k-1))
    gammabar = 1/2 d_(1,1,1) + 1/2 sum_k 4^-k (d_(2k,2k,2k+1) + d_(2k,2k+1,2k) + d_(2k+1,2k,2k))

Both plans have all three marginals equal to mu.  Infinite sums are handled
through the closed forms of :class:`~nflow_ot.cost.FSpec`; finite level-M
truncations feed the combinatorial checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .cost import CostFn, FSpec, counterexample_cost, integrate_plan
from .lp import solve_transport
from .measures import AtomicMeasure, Plan, marginal, marginals, symmetrize
from .monotonicity import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    MonotonicityVerdict,
    check_monotone_lp,
    check_monotone_permutations,
)
from .nflow import associated_ngraph, find_finite_closed_flow, incidence_rank

THRESHOLD = Fraction(1, 6)

PASS, FAIL, CONDITIONAL = "pass", "fail", "conditional-pass"


def check_f_condition(f: FSpec) -> tuple[Fraction, bool]:
    """Exact value of sum_k 4^-k (f(2k-1) - f(2k)) and whether it exceeds 1/6."""
    value = f.quarter_series(-1) - f.quarter_series(0)
    return value, value > THRESHOLD


def mu_weight(j: int) -> Fraction:
    return Fraction(1, 2**j)


def gamma_marginal_weight(j: int) -> Fraction:
    """Mass at point j of a marginal of gamma, read off level (j+1)//2."""
    k = (j + 1) // 2
    return Fraction(2 if j % 2 else 1, 4**k)


def gammabar_marginal_weight(j: int) -> Fraction:
    if j == 1:
        return Fraction(1, 2)
    if j % 2 == 0:
        # level j/2, two of its three atoms sit at 2k in any coordinate
        return Fraction(1, 2) * Fraction(2, 4 ** (j // 2))
    return Fraction(1, 2) * Fraction(1, 4 ** ((j - 1) // 2))


def gamma_level(k: int) -> Plan:
    a, b = 2 * k - 1, 2 * k
    return Plan(3, {(a, a, b): 1, (a, b, a): 1, (b, a, a): 1})


def gammabar_level(k: int) -> Plan:
    a, b = 2 * k, 2 * k + 1
    return Plan(3, {(a, a, b): 1, (a, b, a): 1, (b, a, a): 1})


def build_family(f: Optional[FSpec], M: int):
    """Level-M truncations ``(mu_M, gamma_M, gammabar_M, cost)``.

    ``mu_M`` is mu on {1..2M}; ``gamma_M`` keeps levels k <= M (mass
    1 - 4^-M); ``gammabar_M`` is 1/2 d_(1,1,1) plus levels k <= M of its sum,
    so its support reaches 2M + 1.  Nothing is renormalized.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    f = f if f is not None else FSpec.default()
    mu = AtomicMeasure({j: mu_weight(j) for j in range(1, 2 * M + 1)})
    gamma = Plan(3)
    gammabar = Plan(3, {(1, 1, 1): Fraction(1, 2)})
    for k in range(1, M + 1):
        gamma = gamma + Fraction(1, 4**k) * gamma_level(k)
        gammabar = gammabar + Fraction(1, 2 * 4**k) * gammabar_level(k)
    return mu, gamma, gammabar, counterexample_cost(f)


def exact_cost_gap(f: FSpec) -> tuple[Fraction, Fraction, Fraction]:
    """(<c, gamma>, <c, gammabar>, difference) in closed form.

    Computed directly from the measures: <c, gammabar> carries the factor 1/2
    in front of the level sum, hence 3/2 * sum 4^-k f(2k).
    """
    odd, even = f.quarter_series(-1), f.quarter_series(0)
    cost_gamma = 3 * odd
    cost_gammabar = Fraction(1, 2) + Fraction(3, 2) * even
    return cost_gamma, cost_gammabar, cost_gamma - cost_gammabar


def displayed_gap_expression(f: FSpec) -> Fraction:
    """The variant 3 sum 4^-k (f(2k-1) - f(2k)) - 1/2 (full factor 3 on the even sum)."""
    value, _ = check_f_condition(f)
    return 3 * value - Fraction(1, 2)


def truncation_tail_bound(M: int) -> Fraction:
    """Upper bound on <c, gamma> - <c, gamma_M> since f <= 1: 3 sum_{k>M} 4^-k = 4^-M."""
    return Fraction(1, 4**M)


@dataclass
class VerificationReport:
    f: FSpec
    M_max: int
    ell_max: int
    f_condition: dict = field(default_factory=dict)
    marginal_checks: dict = field(default_factory=dict)
    cost_gamma: Optional[Fraction] = None
    cost_gammabar: Optional[Fraction] = None
    gap: Optional[Fraction] = None
    displayed_gap: Optional[Fraction] = None
    closed_flow_absent: dict = field(default_factory=dict)
    monotonicity_verdicts: dict = field(default_factory=dict)
    lp_checks: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def overall(self) -> str:
        if self.failures:
            return FAIL
        if self.skipped:
            return CONDITIONAL
        return PASS


def _marginal_identities(M_max: int) -> dict:
    """Pointwise closed-form marginals of gamma and gammabar against mu, plus tails."""
    checks = {}
    for M in range(1, M_max + 1):
        ok = True
        for j in (2 * M - 1, 2 * M):
            ok &= gamma_marginal_weight(j) == mu_weight(j)
            ok &= gammabar_marginal_weight(j) == mu_weight(j)
        # mass of mu beyond 2M equals the mass of the untouched levels of each plan
        mu_tail = Fraction(1, 4**M)
        gamma_tail = 3 * Fraction(1, 4**M) * Fraction(1, 3)
        gammabar_tail = Fraction(1, 2) * Fraction(1, 4**M) + Fraction(3, 2) * Fraction(1, 4**M) * Fraction(1, 3)
        ok &= gamma_tail == mu_tail and gammabar_tail == mu_tail
        # and the finite truncations agree with the closed forms
        mu_M, gamma_M, gammabar_M, _ = build_family(None, M)
        for k in (1, 2, 3):
            ok &= marginal(gamma_M, k) == mu_M
            ok &= marginal(gammabar_M, k) == mu_M + AtomicMeasure({2 * M + 1: mu_weight(2 * M + 1)})
        checks[M] = bool(ok)
    return checks


def verify_counterexample(
    f: Optional[FSpec] = None,
    M_max: int = 3,
    ell_max: int = 3,
    *,
    budget: int = DEFAULT_BUDGET,
) -> VerificationReport:
    """Run the whole chain of exact checks on the counterexample family."""
    if M_max < 1:
        raise ValueError("M_max must be >= 1")
    if ell_max < 1:
        raise ValueError("ell_max must be >= 1")
    f = f if f is not None else FSpec.default()
    rep = VerificationReport(f, M_max, ell_max)
    cost = counterexample_cost(f)

    # (i) summability condition on f
    lhs, holds = check_f_condition(f)
    rep.f_condition = {"lhs": lhs, "holds": holds}
    if not holds:
        rep.failures.append("f-condition")

    # (ii) marginals of gamma and gammabar equal mu
    rep.marginal_checks = _marginal_identities(M_max)
    if not all(rep.marginal_checks.values()):
        rep.failures.append("marginals")

    # (iii) cost gap
    rep.cost_gamma, rep.cost_gammabar, rep.gap = exact_cost_gap(f)
    rep.displayed_gap = displayed_gap_expression(f)
    if not rep.gap > 0:
        rep.failures.append("gap")

    # (iv) no finite closed 3-flow on the finite-cost graph
    for M in range(1, M_max + 1):
        G = associated_ngraph(cost, 2 * M + 1)
        rep.closed_flow_absent[M] = find_finite_closed_flow(G) is None
    if not all(rep.closed_flow_absent.values()):
        rep.failures.append("closed-flow")

    # (v) permutation test on the atoms of gamma_M
    for M in range(1, M_max + 1):
        _, gamma_M, _, _ = build_family(f, M)
        support = gamma_M.support()
        try:
            verdict = check_monotone_permutations(support, cost, ell_max, budget=budget)
        except BudgetExceededError as exc:
            rep.skipped[f"permutations M={M}"] = str(exc)
            continue
        rep.monotonicity_verdicts[M] = verdict
        if not verdict.monotone:
            rep.failures.append(f"permutations M={M}")

    # (vi) LP route: gamma_M optimal for its marginals, and the only finite-cost coupling
    for M in range(1, M_max + 1):
        _, gamma_M, _, _ = build_family(f, M)
        verdict = check_monotone_lp(gamma_M, cost)
        plan, value = solve_transport(cost, marginals(gamma_M))
        cells = cost.finite_cells(2 * M)
        unique = incidence_rank(cells, 3) == len(cells)
        ok = verdict.monotone and plan == gamma_M and value == integrate_plan(cost, gamma_M) and unique
        rep.lp_checks[M] = {
            "monotone": verdict.monotone,
            "optimum_is_gamma": plan == gamma_M,
            "value": value,
            "unique": unique,
        }
        if not ok:
            rep.failures.append(f"lp M={M}")
    return rep


def alpha_plan(weights) -> Plan:
    """sum_k alpha_k sym(d_(2k-1,2k-1,2k)), the symmetric plans carried by gamma."""
    p = Plan(3)
    for k, a in enumerate(weights, start=1):
        p = p + Fraction(a) * symmetrize(Plan.unit((2 * k - 1, 2 * k - 1, 2 * k)))
    return p
