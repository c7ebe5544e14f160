from __future__ import annotations

from conftest import c, sample, fin_or_two
from fintrees.formula import BasicFormula, EqAtom, FreshNames, NormalFormula
from fintrees.instantiation import (
    apply_instantiation,
    find_instantiation,
    instantiable_conditions,
    measure_less,
    strip_common_conjuncts,
)
from fintrees.basic import solve_basic
from fintrees.normalize import normalize_negation
from fintrees.solver import SolveContext, solve_nested
from fintrees.stats import Stats
from fintrees.terms import App, Var

SIG, AN = sample()


def nf(bound, alpha, *children):
    return NormalFormula(tuple(bound), alpha, tuple(children))


def child(*eqs, fins=()):
    return nf((), BasicFormula(tuple(eqs), tuple(fins)))


def test_condition_1_generator_split():
    x, y, z = Var("x", "list"), Var("y", "nat"), Var("z", "list")
    phi = nf([x], BasicFormula(), child(EqAtom(x, App("cons", (y, z), "list"))))
    assert instantiable_conditions(x, phi, AN) == [1]
    inst = find_instantiation([], phi, AN)
    assert inst.condition == 1
    assert [str(psi) for _, psi in inst.cases] == ["x = nil", f"x = cons({inst.cases[1][0][0]}, {inst.cases[1][0][1]})"]
    assert len(apply_instantiation(phi, inst)) == 2


def test_condition_2_finite_domain():
    b = Var("b", "bool")
    phi = nf([b], BasicFormula(), child(EqAtom(b, c("true", "bool"))))
    # b = true is also a generator equation; condition 1 takes priority
    assert instantiable_conditions(b, phi, AN)[:2] == [1, 2]
    d, e = Var("d", "bool"), Var("e", "bool")
    phi = nf([d, e], BasicFormula(), child(EqAtom(e, d)))
    assert 2 in instantiable_conditions(d, phi, AN)


def test_condition_3_fin_with_finitely_many_finite_trees():
    x, a = Var("x", "d"), Var("a", "d")
    phi = nf([x], BasicFormula((), (x,)), child(EqAtom(x, a)))
    assert instantiable_conditions(x, phi, AN) == [3]
    inst = find_instantiation([a], phi, AN)
    assert inst.condition == 3 and len(inst.cases) == 2


def test_condition_4_fin_only_child():
    phi_, (y, z) = fin_or_two()
    x = Var("x", "t")
    phi = nf([x], BasicFormula(), child(fins=(x,)), child(EqAtom(x, y)), child(EqAtom(x, z)))
    assert instantiable_conditions(x, phi, AN) == [4]
    inst = find_instantiation([y, z], phi, AN)
    assert inst.condition == 4
    assert len(inst.cases) == 3  # fin(x), x = g2(false, ω), x = g2(true, ω)
    assert inst.cases[0][1] == BasicFormula((), (x,))


def test_no_instantiation_without_children():
    x = Var("x", "nat")
    assert find_instantiation([], nf([x], BasicFormula()), AN) is None


def test_strip_common_conjuncts():
    x, y = Var("x", "nat"), Var("y", "nat")
    a = BasicFormula((EqAtom(x, y),))
    b = BasicFormula((EqAtom(x, y), EqAtom(y, c("zero", "nat"))))
    assert strip_common_conjuncts(a, b).eqs == (EqAtom(y, c("zero", "nat")),)


def test_measure_order():
    assert measure_less({0: 3}, {1: 1})
    assert measure_less({1: 1, 0: 5}, {1: 2})
    assert not measure_less({0: 1}, {0: 1})


def test_fin_or_two_measure_can_increase():
    # documented deviation: a case split can create new deeper instantiable variables
    f, (y, z) = fin_or_two()
    fresh = FreshNames()
    ctx = SolveContext(AN, fresh, Stats(), debug=True)
    n = normalize_negation(f, fresh)
    alpha = solve_basic([y, z, *n.bound], n.alpha, AN)
    results = solve_nested([y, z], NormalFormula(n.bound, alpha, n.children), ctx)
    assert len(results) == 2
    assert ctx.measure_increases
