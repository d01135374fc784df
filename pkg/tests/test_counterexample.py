import random
from fractions import Fraction

import pytest

from nflow_ot.cost import FSpec, integrate_plan
from nflow_ot.counterexample import (
    CONDITIONAL,
    FAIL,
    PASS,
    alpha_plan,
    build_family,
    check_f_condition,
    displayed_gap_expression,
    exact_cost_gap,
    gamma_marginal_weight,
    gammabar_marginal_weight,
    mu_weight,
    truncation_tail_bound,
    verify_counterexample,
)
from nflow_ot.lp import solve_transport
from nflow_ot.measures import AtomicMeasure, Plan, is_symmetric, marginal, marginals

ONE = FSpec.constant(1)


def random_decreasing_fspec(rng):
    """Decreasing f with f(1) > f(2) + 2/3."""
    f1 = Fraction(rng.randint(17, 20), 20)
    vals = [f1, Fraction(rng.randint(0, 19), 20) * (f1 - Fraction(2, 3))]
    for _ in range(rng.randint(0, 4)):
        vals.append(Fraction(rng.randint(1, 20), 20) * vals[-1])
    vals = [v if v > 0 else Fraction(1, 100) for v in vals]
    return FSpec(tuple(vals[:-1]), vals[-1])


def test_f_condition_examples():
    assert check_f_condition(FSpec.default()) == (Fraction(3, 16), True)
    assert check_f_condition(ONE) == (0, False)
    f = FSpec((1, Fraction(1, 4)), Fraction(1, 4))
    assert f(1) > f(2) + Fraction(2, 3) and f.is_decreasing()
    assert check_f_condition(f)[1]


def test_sufficient_condition_implies_series_condition():
    rng = random.Random(41)
    for _ in range(40):
        f = random_decreasing_fspec(rng)
        assert f.is_decreasing() and f(1) > f(2) + Fraction(2, 3)
        assert check_f_condition(f)[1]


def test_family_level_one():
    mu, g, gb, _ = build_family(None, 1)
    q = Fraction(1, 4)
    assert g == Plan(3, {(1, 1, 2): q, (1, 2, 1): q, (2, 1, 1): q})
    assert g.total_mass() == Fraction(3, 4)
    assert marginal(g, 1) == AtomicMeasure({1: Fraction(1, 2), 2: q}) == mu


def test_family_masses():
    assert build_family(None, 2)[1].total_mass() == Fraction(15, 16)
    for M in range(1, 6):
        mu, g, gb, _ = build_family(None, M)
        assert g.total_mass() == 1 - Fraction(1, 4**M) == mu.total_mass()
        assert gb.total_mass() == mu.total_mass() + mu_weight(2 * M + 1)
        assert is_symmetric(g) and is_symmetric(gb)


def test_build_family_rejects_level_zero():
    with pytest.raises(ValueError):
        build_family(None, 0)
    with pytest.raises(ValueError):
        verify_counterexample(M_max=0)


def test_closed_form_marginal_weights():
    _, g, gb, _ = build_family(None, 6)
    for j in range(1, 12):
        assert gamma_marginal_weight(j) == marginal(g, 1)[j] == mu_weight(j)
        assert gammabar_marginal_weight(j) == marginal(gb, 2)[j] == mu_weight(j)


def test_gap_default():
    assert exact_cost_gap(FSpec.default()) == (Fraction(13, 16), Fraction(5, 8), Fraction(3, 16))
    assert displayed_gap_expression(FSpec.default()) == Fraction(1, 16)


def test_gap_constant_one():
    assert exact_cost_gap(ONE) == (1, 1, 0)


def test_gap_against_truncations():
    # <c, gamma_M> converges to the closed form from below with the stated tail bound
    f = FSpec.default()
    cg, cgb, _ = exact_cost_gap(f)
    for M in range(1, 8):
        _, g, gb, c = build_family(f, M)
        vg = integrate_plan(c, g)
        assert 0 <= cg - vg <= truncation_tail_bound(M)
        assert cgb - integrate_plan(c, gb) == Fraction(1, 8 * 4**M)


def test_gap_positive_when_condition_holds():
    rng = random.Random(42)
    hits = 0
    while hits < 20:
        vals = [Fraction(rng.randint(1, 12), 12) for _ in range(rng.randint(1, 6))]
        f = FSpec(tuple(vals[:-1]), vals[-1])
        lhs, ok = check_f_condition(f)
        if ok:
            hits += 1
            assert exact_cost_gap(f)[2] > 0
        # the direct gap exceeds the displayed variant by 3/2 sum 4^-k f(2k)
        assert exact_cost_gap(f)[2] - displayed_gap_expression(f) == Fraction(3, 2) * f.quarter_series(0)


@pytest.mark.parametrize("M,value", [(1, Fraction(3, 4)), (2, Fraction(51, 64)), (3, Fraction(207, 256))])
def test_transport_on_truncations(M, value):
    _, g, _, c = build_family(None, M)
    plan, v = solve_transport(c, marginals(g))
    assert plan == g and v == value == integrate_plan(c, g)


def test_alpha_plan_is_symmetric_with_gamma_weights():
    g = alpha_plan([Fraction(3, 4), Fraction(3, 16)])
    assert g == build_family(None, 2)[1]


def test_verify_default():
    rep = verify_counterexample(None, 3, 3)
    assert rep.overall == PASS and rep.failures == []
    assert rep.f_condition == {"lhs": Fraction(3, 16), "holds": True}
    assert (rep.cost_gamma, rep.cost_gammabar, rep.gap) == (Fraction(13, 16), Fraction(5, 8), Fraction(3, 16))
    assert rep.displayed_gap == Fraction(1, 16)
    assert all(rep.marginal_checks.values()) and all(rep.closed_flow_absent.values())
    assert all(v.monotone and v.ell_checked == 3 for v in rep.monotonicity_verdicts.values())
    assert all(d["monotone"] and d["optimum_is_gamma"] and d["unique"] for d in rep.lp_checks.values())


def test_verify_constant_one_fails():
    rep = verify_counterexample(ONE, 2, 2)
    assert rep.overall == FAIL
    assert "gap" in rep.failures and "f-condition" in rep.failures


def test_verify_budget_gives_conditional_pass():
    rep = verify_counterexample(None, 2, 3, budget=50)
    assert rep.overall == CONDITIONAL
    assert rep.skipped and not rep.failures
