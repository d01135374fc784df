from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nflow_ot.counterexample import build_family
from nflow_ot.measures import (
    AtomicMeasure,
    Plan,
    combine,
    is_symmetric,
    marginal,
    symmetrize,
)
from nflow_ot.scalars import INF, format_extended, parse_extended, parse_rational

weights = st.fractions(min_value=-5, max_value=5, max_denominator=6)
points = st.integers(min_value=0, max_value=4)


def plans(n=3):
    return st.dictionaries(st.tuples(*[points] * n), weights, max_size=6).map(
        lambda d: Plan(n, d)
    )


# --- scalars -----------------------------------------------------------------

def test_inf_orders_above_rationals():
    assert Fraction(10**9) < INF
    assert INF > Fraction(-3)
    assert not INF < Fraction(5)
    assert Fraction(1, 3) + INF is INF
    assert INF + INF is INF
    assert max(Fraction(7), INF) is INF
    assert sorted([INF, Fraction(1), Fraction(-2)]) == [Fraction(-2), Fraction(1), INF]


def test_inf_rejects_nonpositive_scaling():
    assert Fraction(1, 2) * INF is INF
    with pytest.raises(ArithmeticError):
        Fraction(0) * INF


@pytest.mark.parametrize("text,value", [("1/2", Fraction(1, 2)), ("-3", Fraction(-3)), (" 4/6 ", Fraction(2, 3))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1/0", "0.5", "abc", "", "1/2/3"])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_extended_round_trip():
    for x in (INF, Fraction(-7, 3), Fraction(0), Fraction(5)):
        assert parse_extended(format_extended(x)) == x


# --- atomic measures and plans ----------------------------------------------

def test_zero_weights_are_erased():
    mu = AtomicMeasure({1: 0, 2: Fraction(1, 2)})
    assert mu.support() == (2,)
    p = Plan(2, {(1, 1): 1, (1, 2): 0})
    assert p.support() == ((1, 1),)


def test_plan_rejects_wrong_arity():
    with pytest.raises(ValueError):
        Plan(3, {(1, 2): 1})


def test_marginal_single_atom():
    assert marginal(Plan.unit((1, 2, 3)), 2) == AtomicMeasure.dirac(2)


def test_marginal_of_symmetrized_atom():
    p = symmetrize(Plan.unit((1, 1, 2)))
    assert marginal(p, 1) == AtomicMeasure({1: Fraction(2, 3), 2: Fraction(1, 3)})


@pytest.mark.parametrize("M", [1, 2, 3, 4])
def test_marginal_of_gamma_truncation(M):
    _, gamma, _, _ = build_family(None, M)
    # direct summation oracle over the atoms
    expected = {}
    for t, w in gamma.items():
        expected[t[0]] = expected.get(t[0], 0) + w
    assert marginal(gamma, 1) == AtomicMeasure(expected)
    closed_form = {}
    for k in range(1, M + 1):
        closed_form[2 * k - 1] = Fraction(2, 4**k)
        closed_form[2 * k] = Fraction(1, 4**k)
    assert marginal(gamma, 1) == AtomicMeasure(closed_form)


def test_marginal_index_out_of_range():
    with pytest.raises(IndexError):
        marginal(Plan.unit((1, 2, 3)), 4)
    with pytest.raises(IndexError):
        marginal(Plan.unit((1, 2, 3)), 0)


def test_combine_cancels():
    p = Plan(3, {(1, 1, 2): Fraction(1, 4), (2, 1, 1): 3})
    assert combine(1, p, -1, p).is_zero()


def test_combine_doubles():
    d = Plan.unit((1, 1, 1))
    assert combine(1, d, 1, d) == Plan(3, {(1, 1, 1): 2})


def test_combine_gamma_minus_gammabar():
    _, g, gb, _ = build_family(None, 2)
    diff = combine(1, g, -1, gb)
    assert set(diff.support()) == set(g.support()) | set(gb.support())
    for t in diff.support():
        assert diff[t] == g[t] - gb[t]


def test_combine_arity_mismatch():
    with pytest.raises(ValueError):
        combine(1, Plan.unit((1, 1)), 1, Plan.unit((1, 1, 1)))


def test_symmetrize_examples():
    third = Fraction(1, 3)
    assert symmetrize(Plan.unit((1, 1, 2))) == Plan(
        3, {(1, 1, 2): third, (1, 2, 1): third, (2, 1, 1): third}
    )
    assert symmetrize(Plan.unit((1, 1, 1))) == Plan.unit((1, 1, 1))
    s = symmetrize(Plan.unit((1, 2, 3)))
    assert len(s) == 6 and all(w == Fraction(1, 6) for _, w in s.items())


@given(plans(), plans(), weights, weights, st.integers(1, 3))
def test_marginal_is_linear(p, q, a, b, k):
    lhs = marginal(combine(a, p, b, q), k)
    assert lhs == a * marginal(p, k) + b * marginal(q, k)


@given(plans(), st.integers(1, 3))
def test_marginal_preserves_mass(p, k):
    assert marginal(p, k).total_mass() == p.total_mass()


@given(plans())
def test_symmetrize_idempotent_and_mass_preserving(p):
    s = symmetrize(p)
    assert symmetrize(s) == s
    assert s.total_mass() == p.total_mass()
    assert is_symmetric(s)


@given(plans())
def test_symmetric_plans_have_equal_marginals(p):
    s = symmetrize(p)
    assert marginal(s, 1) == marginal(s, 2) == marginal(s, 3)


def test_probability_flag():
    assert symmetrize(Plan.unit((1, 1, 2))).is_probability()
    assert not Plan(2, {(1, 1): Fraction(1, 2)}).is_probability()
    assert not Plan(2, {(1, 1): 2, (1, 2): -1}).is_probability()
