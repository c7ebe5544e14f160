from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from fintrees.terms import App, Var
from fintrees.trees import RationalTree, is_finite_tree, rational_tree_equal

ZERO = RationalTree.leaf("zero")


def succ_n(n: int, base: RationalTree = ZERO) -> RationalTree:
    t = base
    for _ in range(n):
        t = RationalTree.apply("succ", [t])
    return t


def omega() -> RationalTree:
    u = Var("u", "nat")
    return RationalTree.from_system({u: App("succ", (u,), "nat")}, [u])[u]


def test_finite_trees_compare_structurally():
    assert succ_n(3) == succ_n(3)
    assert succ_n(3) != succ_n(4)
    assert is_finite_tree(succ_n(5))


def test_cycle_unfoldings_are_equal():
    w = omega()
    assert not w.is_finite()
    # succ(ω) = ω, whatever table shape is used
    assert RationalTree.apply("succ", [w]) == w
    assert rational_tree_equal(succ_n(7, w), w)
    assert w.size() == 1


def test_two_cycles_with_different_periods_coincide():
    a, b = Var("a", "nat"), Var("b", "nat")
    sols = RationalTree.from_system(
        {a: App("succ", (b,), "nat"), b: App("succ", (a,), "nat")}, [a, b]
    )
    assert sols[a] == sols[b] == omega()


def test_rendering_of_cycles():
    assert str(omega()) == "μw0. succ(w0)"
    assert omega().to_sexpr() == "(mu w0 (succ w0))"
    assert str(succ_n(2)) == "succ(succ(zero))"


def test_to_term_round_trip():
    sorts = {"zero": "nat", "succ": "nat"}
    t = succ_n(3).to_term(sorts)
    assert RationalTree.from_term(t) == succ_n(3)


@given(st.integers(0, 20), st.integers(0, 20))
def test_equality_matches_depth(m, n):
    assert (succ_n(m) == succ_n(n)) == (m == n)
    assert (hash(succ_n(m)) == hash(succ_n(n))) or m != n


@given(st.integers(0, 8))
def test_omega_absorbs_prefixes(n):
    assert succ_n(n, omega()) == omega()
