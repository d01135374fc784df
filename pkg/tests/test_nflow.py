import random
from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import rand_3flow, rand_closed_3flow, rand_plan
from nflow_ot.cost import TableCost, counterexample_cost
from nflow_ot.counterexample import build_family
from nflow_ot.measures import AtomicMeasure, Plan, marginal
from nflow_ot.nflow import (
    NFlow,
    NGraph,
    associated_ngraph,
    boundary,
    find_finite_closed_flow,
    incidence_matrix,
    incidence_rank,
    integrate_flow,
    is_closed,
    is_subflow,
    kernel_basis,
    mass,
)
from nflow_ot.scalars import INF

CUBE = [(1, 1, 1), (1, 1, 2), (2, 2, 1), (2, 2, 2)]


def flows(n=3):
    return st.dictionaries(
        st.tuples(*[st.integers(1, 3)] * n),
        st.fractions(min_value=-4, max_value=4, max_denominator=5),
        max_size=6,
    ).map(lambda d: NFlow(n, d))


def test_single_edge_boundary():
    b = boundary(NFlow(3, {(1, 2, 3): 1}))
    assert b.components == (AtomicMeasure.dirac(1), AtomicMeasure.dirac(2), AtomicMeasure.dirac(3))
    assert mass(NFlow(3, {(1, 2, 3): 1})) == 1


def test_square_loop_is_closed():
    A = NFlow(2, {(1, 1): 1, (1, 2): -1, (2, 2): 1, (2, 1): -1})
    assert is_closed(A) and mass(A) == 4


def test_cube_witness():
    w = find_finite_closed_flow(CUBE, 3)
    assert w == NFlow(3, {(1, 1, 1): 1, (1, 1, 2): -1, (2, 2, 1): -1, (2, 2, 2): 1})
    assert is_closed(w)


def test_two_tree_edges_have_no_cycle():
    assert find_finite_closed_flow([(1, 1, 2), (2, 2, 1)], 3) is None
    assert find_finite_closed_flow([], 3) is None


def test_ngraph_rejects_infinite_edges():
    with pytest.raises(ValueError):
        NGraph(3, ((1, 2, 3),), counterexample_cost())


def test_associated_graph_of_counterexample():
    G = associated_ngraph(counterexample_cost(), 3)
    # (1,1,1) plus permutations of (a,a,a+1) inside 1..3
    expected = {(1, 1, 1)}
    for a in (1, 2):
        expected |= {(a, a, a + 1), (a, a + 1, a), (a + 1, a, a)}
    assert set(G.edges) == expected


@pytest.mark.parametrize("bound", [1, 2, 3, 5, 9, 15])
def test_counterexample_graph_has_no_closed_flow(bound):
    G = associated_ngraph(counterexample_cost(), bound)
    assert find_finite_closed_flow(G) is None
    assert incidence_rank(G.edges, 3) == len(G.edges)


def test_integrate_flow():
    c = counterexample_cost()
    assert integrate_flow(c, NFlow(3, {(1, 1, 1): 2, (1, 1, 2): -1})) == 1
    assert integrate_flow(c, NFlow(3, {(1, 1, 1): 1, (1, 2, 3): Fraction(1, 9)})) is INF


def test_subflow_predicate():
    B = NFlow(2, {(1, 1): 3, (1, 2): -2})
    assert is_subflow(NFlow(2, {(1, 1): 1, (1, 2): -2}), B)
    assert not is_subflow(NFlow(2, {(1, 1): 4}), B)
    assert not is_subflow(NFlow(2, {(1, 2): 1}), B)
    assert not is_subflow(NFlow(2, {(2, 2): 1}), B)


@pytest.mark.parametrize("M", [1, 2, 3, 4])
def test_truncation_boundary_defect(M):
    _, g, gb, _ = build_family(None, M)
    assert mass(NFlow.from_plan(g)) == 1 - Fraction(1, 4**M)
    b = boundary(NFlow.from_plan(g) - NFlow.from_plan(gb))
    tail = -Fraction(1, 2 * 4**M) * AtomicMeasure.dirac(2 * M + 1)
    assert b.components == (tail, tail, tail)
    assert b.abs_mass() == Fraction(3, 2 * 4**M)


@given(flows(), flows(), st.fractions(-3, 3, max_denominator=4), st.fractions(-3, 3, max_denominator=4))
def test_boundary_is_linear(A, B, a, b):
    lhs = boundary(a * A + b * B)
    assert lhs == a * boundary(A) + b * boundary(B)


@given(flows())
def test_boundary_mass_bound(A):
    # each coordinate's boundary mass is at most the flow mass
    for mu in boundary(A).components:
        assert mu.abs_mass() <= mass(A)
    assert boundary(A).abs_mass() <= A.n * mass(A)


def test_plan_flow_correspondence(rng):
    for _ in range(50):
        p = rand_plan(rng)
        A = NFlow.from_plan(p)
        assert mass(A) == p.total_mass()
        assert boundary(A).components == tuple(marginal(p, k) for k in (1, 2, 3))
        # closed differences of plans are exactly pairs with equal marginals
        q = rand_plan(rng)
        same = all(marginal(p, k) == marginal(q, k) for k in (1, 2, 3))
        assert is_closed(NFlow.from_plan(p) - NFlow.from_plan(q)) == same


def test_closed_flow_from_equal_marginal_plans(rng):
    for _ in range(30):
        C = rand_closed_3flow(rng)
        pos = Plan(3, [(e, w) for e, w in C.items() if w > 0])
        neg = Plan(3, [(e, -w) for e, w in C.items() if w < 0])
        assert all(marginal(pos, k) == marginal(neg, k) for k in (1, 2, 3))


def _sympy_nullity(edges, n):
    _, M = incidence_matrix(edges, n)
    if not M:
        return len(edges)
    return len(sympy.Matrix(M).nullspace())


def test_kernel_matches_sympy_nullspace():
    rng = random.Random(21)
    cells = list(product((1, 2, 3), repeat=3))
    for _ in range(60):
        edges = sorted(rng.sample(cells, rng.randint(1, 9)))
        basis = kernel_basis(edges, 3)
        assert len(basis) == _sympy_nullity(edges, 3)
        for v in basis:
            assert is_closed(v) and set(v.support()) <= set(edges)
        w = find_finite_closed_flow(edges, 3)
        assert (w is None) == (not basis)
        if w is not None:
            assert next(iter(w.items()))[1] == 1


def test_kernel_monotone_under_restriction():
    rng = random.Random(22)
    cells = list(product((1, 2, 3), repeat=3))
    for _ in range(40):
        big = rng.sample(cells, rng.randint(2, 12))
        small = rng.sample(big, rng.randint(1, len(big)))
        if find_finite_closed_flow(small, 3) is not None:
            assert find_finite_closed_flow(big, 3) is not None
        assert len(kernel_basis(small, 3)) <= len(kernel_basis(big, 3))


def test_witness_on_random_cost_graphs(rng):
    for _ in range(20):
        c = TableCost(3, {t: 0 for t in product((1, 2), repeat=3) if rng.random() < 0.6})
        G = associated_ngraph(c, 2)
        w = find_finite_closed_flow(G)
        if w is not None:
            assert is_closed(w) and not w.is_zero()
            assert set(w.support()) <= set(G.edges)


def test_random_flows_closed_iff_zero_boundary(rng):
    for _ in range(40):
        A = rand_3flow(rng)
        assert is_closed(A) == all(boundary(A).components[k].is_zero() for k in range(3))
