import random
from fractions import Fraction
from itertools import permutations, product

import pytest
from hypothesis import settings

from nflow_ot.cost import TableCost
from nflow_ot.decompose import Loop2
from nflow_ot.measures import Plan
from nflow_ot.nflow import NFlow
from nflow_ot.scalars import INF

settings.register_profile("repo", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("repo")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def rand_fraction(rng, lo=-9, hi=9, max_den=4):
    return Fraction(rng.randint(lo, hi), rng.randint(1, max_den))


def rand_table_cost(rng, n=3, points=(1, 2, 3), p_inf=0.3):
    entries = {}
    for t in product(points, repeat=n):
        entries[t] = INF if rng.random() < p_inf else rand_fraction(rng)
    return TableCost(n, entries, INF)


def rand_plan(rng, n=3, points=(1, 2, 3), max_atoms=4, positive=True):
    atoms = {}
    for _ in range(rng.randint(1, max_atoms)):
        t = tuple(rng.choice(points) for _ in range(n))
        w = Fraction(rng.randint(1, 5), rng.randint(1, 4))
        if not positive and rng.random() < 0.5:
            w = -w
        atoms[t] = atoms.get(t, 0) + w
    return Plan(n, atoms)


def permuted_competitor(rng, tuples):
    """Empirical competitor: shuffle each coordinate independently (first one fixed)."""
    ell = len(tuples)
    n = len(tuples[0])
    perms = [list(range(ell))] + [rng.sample(range(ell), ell) for _ in range(n - 1)]
    return [tuple(tuples[perms[k][j]][k] for k in range(n)) for j in range(ell)]


def rand_closed_3flow(rng, points=(1, 2, 3), ell=None):
    ell = ell or rng.randint(2, 4)
    xs = [tuple(rng.choice(points) for _ in range(3)) for _ in range(ell)]
    ys = permuted_competitor(rng, xs)
    w = rand_fraction(rng, 1, 5, 3)
    return NFlow(3, [(t, w) for t in xs] + [(t, -w) for t in ys])


def rand_loop(rng, pts=6):
    r = rng.randint(2, 4)
    xs = rng.sample(range(1, pts + 1), r)
    ys = rng.sample(range(1, pts + 1), r)
    v = tuple(p for pair in zip(xs, ys) for p in pair)
    return Loop2(v, Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 5)))


def rand_3flow(rng, points=(1, 2, 3)):
    A = NFlow(3, [
        (tuple(rng.randint(points[0], points[-1]) for _ in range(3)), rand_fraction(rng, -5, 5, 3))
        for _ in range(rng.randint(1, 6))
    ])
    for _ in range(rng.randint(0, 2)):
        A = A + rand_closed_3flow(rng, points)
    return A


@pytest.fixture
def rng():
    return random.Random(20261015)


def all_perm_tuples(ell, n):
    return product(permutations(range(ell)), repeat=n)
