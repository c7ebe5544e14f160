from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fintrees.datatypes import (
    CODATATYPE,
    DATATYPE,
    Constructor,
    DatatypeDecl,
    check_declarations,
    default_interpretation,
    default_table,
    default_value_for,
    eliminate_selectors_default,
    eliminate_selectors_standard,
    embed_in_trees,
    has_selectors,
    satisfiable_standard,
    truncated_domain,
)
from fintrees.errors import (
    DuplicateName,
    MissingDefault,
    MixedDeclaration,
    NonWellFounded,
    QuantifiedInput,
    SingularSort,
    UnknownSort,
)
from fintrees.formula import And, Eq, Exists, Fin, Not, free_variables
from fintrees.oracle import all_valuations, eval_formula, random_datatype_formula
from fintrees.signature import analyze
from fintrees.solver import solve
from fintrees.terms import App, Sel, Var

BOOL = DatatypeDecl("bool", DATATYPE, (Constructor("T"), Constructor("F")))
OPT = DatatypeDecl("opt", DATATYPE, (Constructor("none"), Constructor("some", (("val", "bool"),))))
LIST = DatatypeDecl("list", DATATYPE, (Constructor("nil"), Constructor("cons", (("head", "bool"), ("tail", "list")))))
DS = check_declarations([BOOL, OPT, LIST])
AN = analyze(DS.signature)
DOMS = {s: truncated_domain(DS.signature, s, 3) for s in DS.signature.sorts}


def dom(sort):
    return DOMS[sort]


def sat_trees(g) -> bool:
    fv = free_variables(g)
    return solve(Exists(tuple(fv), g) if fv else g, DS.signature, AN).is_true


NIL = App("nil", (), "list")
T = App("T", (), "bool")
F = App("F", (), "bool")


def test_declaration_errors():
    with pytest.raises(DuplicateName):
        check_declarations([BOOL, BOOL])
    with pytest.raises(UnknownSort):
        check_declarations([DatatypeDecl("l", DATATYPE, (Constructor("c", (("h", "nat"),)),))])
    with pytest.raises(NonWellFounded):
        check_declarations([DatatypeDecl("inf", DATATYPE, (Constructor("nx", (("next", "inf"),)),))])
    stream = DatatypeDecl("stream", CODATATYPE, (Constructor("sc", (("shd", "bool"), ("stl", "stream"))),))
    with pytest.raises(MixedDeclaration):
        check_declarations([BOOL, stream])


def test_codatatype_without_base_case_is_allowed():
    co = DatatypeDecl("inf", CODATATYPE, (Constructor("nx", (("next", "inf"),)),))
    ds = check_declarations([co])
    assert ds.kinds["inf"] == CODATATYPE


def test_default_values():
    tbl = default_table(DS, AN)
    assert tbl[("cons", 1)] == default_value_for("bool", AN)
    assert str(tbl[("cons", 2)]) == "nil"
    assert str(tbl[("some", 1)]) in ("T", "F")


def test_default_semantics_pins_wrong_constructor():
    tbl = default_table(DS, AN)
    head_nil = Sel("head", NIL, "bool")
    expected = str(tbl[("cons", 1)])
    assert sat_trees(embed_in_trees(eliminate_selectors_default(Eq(head_nil, App(expected, (), "bool")), DS, tbl), DS))
    other = "F" if expected == "T" else "T"
    assert not sat_trees(embed_in_trees(eliminate_selectors_default(Eq(head_nil, App(other, (), "bool")), DS, tbl), DS))


def test_missing_default():
    with pytest.raises(MissingDefault):
        eliminate_selectors_default(Eq(Sel("head", NIL, "bool"), T), DS, {})


def test_standard_semantics_leaves_wrong_constructor_open():
    head_nil = Sel("head", NIL, "bool")
    for b in (T, F):
        g = eliminate_selectors_standard(Eq(head_nil, b), DS)
        assert not has_selectors(g)
        assert sat_trees(embed_in_trees(g, DS))
    # but the same selector term has one value
    both = And((Eq(head_nil, T), Eq(head_nil, F)))
    assert not sat_trees(embed_in_trees(eliminate_selectors_standard(both, DS), DS))


def test_standard_semantics_congruence():
    l, m = Var("l", "list"), Var("m", "list")
    f = And((Eq(l, m), Eq(Sel("head", l, "bool"), T), Eq(Sel("head", m, "bool"), F)))
    assert not satisfiable_standard(f, DS, dom)
    assert not sat_trees(embed_in_trees(eliminate_selectors_standard(f, DS), DS))


def test_standard_rejects_quantifiers():
    l = Var("l", "list")
    with pytest.raises(QuantifiedInput):
        eliminate_selectors_standard(Exists((l,), Eq(Sel("head", l, "bool"), T)), DS)


def test_embedding_excludes_infinite_lists():
    l = Var("l", "list")
    cyc = Eq(l, App("cons", (T, l), "list"))
    assert not sat_trees(embed_in_trees(cyc, DS))
    assert sat_trees(cyc)  # as trees, the cyclic list exists
    assert isinstance(embed_in_trees(cyc, DS), And)


def test_truncated_domain():
    assert len(dom("bool")) == 2
    assert len(dom("opt")) == 3
    # nil, cons(b, nil), cons(b, cons(b', nil))
    assert len(dom("list")) == 1 + 2 + 4
    assert all(t.is_finite() for t in dom("list"))


def test_codatatype_lazy_lists_admit_cycles():
    bit = DatatypeDecl("bit", CODATATYPE, (Constructor("o"), Constructor("i")))
    llist = DatatypeDecl(
        "llist", CODATATYPE, (Constructor("lnil"), Constructor("lcons", (("lhd", "bit"), ("ltl", "llist"))))
    )
    ds = check_declarations([bit, llist])
    an = analyze(ds.signature)
    s = Var("s", "llist")
    f = embed_in_trees(Exists((s,), And((Not(Eq(s, App("lnil", (), "llist"))), Eq(Sel("ltl", s, "llist"), s)))), ds)
    g = eliminate_selectors_default(f, ds, default_table(ds, an))
    assert solve(g, ds.signature, an).is_true
    # the same constraint over a datatype has no solution
    l = Var("l", "list")
    h = embed_in_trees(Exists((l,), And((Not(Eq(l, NIL)), Eq(Sel("tail", l, "list"), l)))), DS)
    assert not sat_trees(eliminate_selectors_default(h, DS, default_table(DS, AN)))


def test_single_constructor_sorts_are_rejected_by_the_analysis():
    stream = DatatypeDecl("stream", CODATATYPE, (Constructor("sc", (("shd", "stream"),)),))
    ds = check_declarations([stream])
    with pytest.raises(SingularSort):
        analyze(ds.signature)


DEEP = {s: truncated_domain(DS.signature, s, 5) for s in DS.signature.sorts}


def deep(sort):
    return DEEP[sort]


# Truncated domains can only hide witnesses; when the pipeline finds a model
# the shallow oracle missed, the oracle is asked again with deeper trees.


@settings(max_examples=25)
@given(st.integers(0, 1_000_000))
def test_standard_pipeline_equisatisfiable(seed):
    f = random_datatype_formula(seed, DS)
    got = sat_trees(embed_in_trees(eliminate_selectors_standard(f, DS), DS))
    expected = satisfiable_standard(f, DS, dom)
    if got and not expected:
        expected = satisfiable_standard(f, DS, deep)
    assert got == expected


def test_shallow_truncation_can_miss_witnesses():
    f = random_datatype_formula(50324, DS)  # cons(head(x1), cons(T, x1)) = tail(tail(x1))
    assert not satisfiable_standard(f, DS, dom)
    assert satisfiable_standard(f, DS, deep)
    assert sat_trees(embed_in_trees(eliminate_selectors_standard(f, DS), DS))


@settings(max_examples=25)
@given(st.integers(0, 1_000_000))
def test_default_pipeline_equisatisfiable(seed):
    tbl = default_table(DS, AN)
    sel = default_interpretation(DS, tbl)
    f = random_datatype_formula(seed, DS)
    got = sat_trees(embed_in_trees(eliminate_selectors_default(f, DS, tbl), DS))

    def sat_in(domain) -> bool:
        return any(eval_formula(f, v, domain, sel) for v in all_valuations(free_variables(f), domain))

    expected = sat_in(dom) or (got and sat_in(deep))
    assert got == expected
