from __future__ import annotations

import itertools
import random

from hypothesis import given
from hypothesis import strategies as st

from conftest import c, sample, random_basic
from fintrees.basic import Contradiction, is_properly_reachable, is_solved_basic, reachable_set, solve_basic
from fintrees.formula import BasicFormula, EqAtom
from fintrees.oracle import basic_satisfiable, candidate_pool
from fintrees.stats import Stats
from fintrees.terms import App, Var

SIG, AN = sample()


def test_clash_is_contradiction():
    x = Var("x", "nat")
    b = BasicFormula((EqAtom(x, c("zero", "nat")), EqAtom(x, App("succ", (x,), "nat"))))
    assert isinstance(solve_basic([x], b, AN), Contradiction)


def test_fin_on_cycle_is_contradiction():
    x = Var("x", "nat")
    b = BasicFormula((EqAtom(x, App("succ", (x,), "nat")),), (x,))
    assert not solve_basic([x], b, AN)


def test_fin_on_infinite_only_sort():
    t = Var("t", "inftree")
    assert not solve_basic([t], BasicFormula((), (t,)), AN)


def test_fin_dropped_on_finite_only_sort():
    b = Var("b", "bool")
    assert solve_basic([b], BasicFormula((), (b,)), AN).is_empty()


def test_variable_equations_oriented_by_order():
    x, y = Var("x", "nat"), Var("y", "nat")
    out = solve_basic([x, y], BasicFormula((EqAtom(x, y),)), AN)
    assert out.eqs == (EqAtom(y, x),)


def test_reachability():
    x, y, z = Var("x", "nat"), Var("y", "nat"), Var("z", "nat")
    b = BasicFormula((EqAtom(x, App("succ", (y,), "nat")), EqAtom(y, App("succ", (x,), "nat"))))
    assert reachable_set(x, b) == {x, y}
    assert is_properly_reachable(x, b)
    assert not is_properly_reachable(z, b)


@given(st.integers(0, 1_000_000))
def test_output_is_solved_and_equisatisfiable(seed):
    order, b = random_basic(seed, SIG)
    out = solve_basic(order, b, AN)
    assert basic_satisfiable(b, {}, AN) == (not isinstance(out, Contradiction))
    if isinstance(out, Contradiction):
        return
    assert is_solved_basic(order, out, AN)
    # equivalent on sampled valuations of all variables
    vs = sorted(set(b.variables()), key=lambda v: v.name)[:3]
    pools = [candidate_pool(SIG, AN, v.sort, depth=2, cap=4) for v in vs]
    for vals in itertools.islice(itertools.product(*pools), 64):
        val = dict(zip(vs, vals))
        assert basic_satisfiable(b, val, AN) == basic_satisfiable(out, val, AN)


@given(st.integers(0, 1_000_000), st.integers(0, 1_000))
def test_random_scheduling_agrees(seed, sched):
    order, b = random_basic(seed, SIG)
    n = len(b.eqs) + len(b.fins)
    ref = solve_basic(order, b, AN)
    out = solve_basic(order, b, AN, stats=Stats(budget=10 * (n * n + n) + 50), rng=random.Random(sched))
    if isinstance(ref, Contradiction):
        assert isinstance(out, Contradiction)
    else:
        assert not isinstance(out, Contradiction) and out.atoms() == ref.atoms()
