"""Pretty and s-expression printers for terms and formulae."""

from __future__ import annotations

from .formula import (
    And,
    Bottom,
    Eq,
    Exists,
    Fin,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Top,
)
from .terms import App, Sel, Term, Var


def term_str(t: Term) -> str:
    return str(t)


def term_sexpr(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, App):
        if not t.args:
            return t.gen
        return f"({t.gen} {' '.join(term_sexpr(a) for a in t.args)})"
    return f"({t.selector} {term_sexpr(t.arg)})"


_PREC = {Or: 1, And: 2, Implies: 0, Iff: 0}


def pretty(f: Formula) -> str:
    def go(g: Formula, ctx: int) -> str:
        if isinstance(g, Top):
            return "true"
        if isinstance(g, Bottom):
            return "false"
        if isinstance(g, Eq):
            return f"{g.lhs} = {g.rhs}"
        if isinstance(g, Fin):
            return f"fin({g.arg})"
        if isinstance(g, Not):
            inner = g.arg
            if isinstance(inner, Eq):
                return f"{inner.lhs} ≠ {inner.rhs}"
            return f"¬{go(inner, 9)}"
        if isinstance(g, (And, Or)):
            op = " ∧ " if isinstance(g, And) else " ∨ "
            p = _PREC[type(g)]
            s = op.join(go(a, p + 1) for a in g.args)
            return f"({s})" if ctx > p else s
        if isinstance(g, (Implies, Iff)):
            op = " → " if isinstance(g, Implies) else " ↔ "
            s = f"{go(g.lhs, 1)}{op}{go(g.rhs, 1)}"
            return f"({s})" if ctx > 0 else s
        if isinstance(g, (Exists, Forall)):
            q = "∃" if isinstance(g, Exists) else "∀"
            vs = ",".join(f"{v.name}:{v.sort}" for v in g.vars)
            s = f"{q}{vs}. {go(g.body, 0)}"
            return f"({s})" if ctx > 0 else s
        raise TypeError(g)

    return go(f, 0)


def sexpr(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Eq):
        return f"(= {term_sexpr(f.lhs)} {term_sexpr(f.rhs)})"
    if isinstance(f, Fin):
        return f"(fin {term_sexpr(f.arg)})"
    if isinstance(f, Not):
        return f"(not {sexpr(f.arg)})"
    if isinstance(f, (And, Or)):
        op = "and" if isinstance(f, And) else "or"
        return f"({op} {' '.join(sexpr(a) for a in f.args)})"
    if isinstance(f, Implies):
        return f"(=> {sexpr(f.lhs)} {sexpr(f.rhs)})"
    if isinstance(f, Iff):
        return f"(<=> {sexpr(f.lhs)} {sexpr(f.rhs)})"
    if isinstance(f, (Exists, Forall)):
        q = "exists" if isinstance(f, Exists) else "forall"
        vs = " ".join(f"({v.name} {v.sort})" for v in f.vars)
        return f"({q} ({vs}) {sexpr(f.body)})"
    raise TypeError(f)
