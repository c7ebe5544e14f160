"""Flattening, normalization into normal formulae, and canonical forms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import SortError
from .formula import (
    And,
    Atom,
    BasicFormula,
    Bottom,
    Eq,
    EqAtom,
    Exists,
    Fin,
    FinAtom,
    Forall,
    Formula,
    FreshNames,
    Iff,
    Implies,
    NormalFormula,
    Not,
    Or,
    Top,
    free_variables,
)
from .terms import App, Sel, Term, Var, subst_term


# -- flattening -----------------------------------------------------------------

class _Flattener:
    def __init__(self, fresh: FreshNames):
        self.fresh = fresh
        self.new_vars: list[Var] = []
        self.eqs: list[EqAtom] = []
        self.fins: list[Var] = []

    def var_for(self, t: Term) -> Var:
        if isinstance(t, Var):
            return t
        if isinstance(t, Sel):
            raise SortError(f"selector {t.selector} must be eliminated before solving")
        v = self.fresh.var(t.sort)
        self.new_vars.append(v)
        self.eqs.append(EqAtom(v, self.flat_app(t)))
        return v

    def flat_app(self, t: App) -> App:
        return App(t.gen, tuple(self.var_for(a) for a in t.args), t.sort)

    def equation(self, a: Term, b: Term) -> None:
        if isinstance(a, Sel) or isinstance(b, Sel):
            raise SortError("selectors must be eliminated before solving")
        if isinstance(a, Var) and isinstance(b, Var):
            self.eqs.append(EqAtom(a, b))
        elif isinstance(a, Var):
            self.eqs.append(EqAtom(a, self.flat_app(b)))  # type: ignore[arg-type]
        elif isinstance(b, Var):
            self.eqs.append(EqAtom(b, self.flat_app(a)))
        else:
            v = self.var_for(a)
            self.eqs.append(EqAtom(v, self.flat_app(b)))  # type: ignore[arg-type]

    def fin(self, t: Term) -> None:
        self.fins.append(self.var_for(t))

    def basic(self) -> BasicFormula:
        return BasicFormula(tuple(self.eqs), tuple(self.fins))


def flatten_to_basic(
    atoms: Iterable[Formula], fresh: FreshNames
) -> tuple[list[Var], BasicFormula]:
    """Flatten a conjunction of Eq/Fin atoms, introducing fresh variables."""
    fl = _Flattener(fresh)
    for a in atoms:
        if isinstance(a, Eq):
            fl.equation(a.lhs, a.rhs)
        elif isinstance(a, Fin):
            fl.fin(a.arg)
        elif isinstance(a, Top):
            continue
        else:
            raise TypeError(f"flatten_to_basic expects atoms, got {a!r}")
    return fl.new_vars, fl.basic()


# -- normalization --------------------------------------------------------------

@dataclass
class _Body:
    """``∃bound. eqs ∧ fins ∧ ⋀children`` under construction."""

    bound: list[Var] = field(default_factory=list)
    eqs: list[EqAtom] = field(default_factory=list)
    fins: list[Var] = field(default_factory=list)
    children: list[NormalFormula] = field(default_factory=list)

    def extend(self, other: "_Body") -> None:
        self.bound += other.bound
        self.eqs += other.eqs
        self.fins += other.fins
        self.children += other.children

    def seal(self) -> NormalFormula:
        return NormalFormula(
            tuple(self.bound), BasicFormula(tuple(self.eqs), tuple(self.fins)), tuple(self.children)
        )


class Normalizer:
    def __init__(self, fresh: FreshNames):
        self.fresh = fresh

    def neg(self, f: Formula, env: Mapping[Var, Var]) -> NormalFormula:
        """A normal formula equivalent to ``¬f``."""
        return self.body(f, env).seal()

    def body(self, f: Formula, env: Mapping[Var, Var]) -> _Body:
        """A body equivalent to ``f`` (iterative on conjunction spines)."""
        out = _Body()
        stack: list[tuple[Formula, Mapping[Var, Var]]] = [(f, env)]
        while stack:
            g, e = stack.pop()
            if isinstance(g, Top):
                continue
            if isinstance(g, Bottom):
                out.children.append(NormalFormula((), BasicFormula(), ()))
            elif isinstance(g, (Eq, Fin)):
                fl = _Flattener(self.fresh)
                if isinstance(g, Eq):
                    fl.equation(subst_term(g.lhs, e), subst_term(g.rhs, e))
                else:
                    fl.fin(subst_term(g.arg, e))
                out.bound += fl.new_vars
                out.eqs += fl.eqs
                out.fins += fl.fins
            elif isinstance(g, And):
                stack.extend((a, e) for a in reversed(g.args))
            elif isinstance(g, Exists):
                e2 = dict(e)
                for v in g.vars:
                    nv = self.fresh.var(v.sort)
                    e2[v] = nv
                    out.bound.append(nv)
                stack.append((g.body, e2))
            elif isinstance(g, Or):
                inner = _Body(children=[self.neg(a, e) for a in g.args])
                out.children.append(inner.seal())
            elif isinstance(g, Implies):
                stack.append((Or((Not(g.lhs), g.rhs)), e))
            elif isinstance(g, Iff):
                stack.append((And((Implies(g.lhs, g.rhs), Implies(g.rhs, g.lhs))), e))
            elif isinstance(g, Forall):
                stack.append((Not(Exists(g.vars, Not(g.body))), e))
            elif isinstance(g, Not):
                h = g.arg
                if isinstance(h, Top):
                    out.children.append(NormalFormula((), BasicFormula(), ()))
                elif isinstance(h, Bottom):
                    continue
                elif isinstance(h, Not):
                    stack.append((h.arg, e))
                elif isinstance(h, Or):
                    stack.extend((Not(a), e) for a in reversed(h.args))
                elif isinstance(h, Implies):
                    stack.append((Not(h.rhs), e))
                    stack.append((h.lhs, e))
                elif isinstance(h, Forall):
                    stack.append((Exists(h.vars, Not(h.body)), e))
                else:
                    out.children.append(self.neg(h, e))
            else:
                raise SortError(f"not a formula: {g!r}")
        return out


def normalize(f: Formula, fresh: FreshNames | None = None) -> NormalFormula:
    """A normal formula equivalent to ``f``; bound variables are renamed fresh."""
    fresh = fresh or FreshNames()
    return Normalizer(fresh).neg(Not(f), {})


def normalize_negation(f: Formula, fresh: FreshNames) -> NormalFormula:
    """A normal formula equivalent to ``¬f`` (the first step of solving ``f``)."""
    return Normalizer(fresh).neg(f, {})


# -- canonical forms --------------------------------------------------------------

def _term_shape(t: Term, bound: frozenset) -> str:
    if isinstance(t, Var):
        return f"?{t.sort}" if t in bound else f"{t.name}:{t.sort}"
    if isinstance(t, App):
        return f"{t.gen}({','.join(_term_shape(a, bound) for a in t.args)})"
    return f"{t.selector}[{_term_shape(t.arg, bound)}]"


def _shape(f: Formula, bound: frozenset) -> str:
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bottom):
        return "F"
    if isinstance(f, Eq):
        return f"=({_term_shape(f.lhs, bound)},{_term_shape(f.rhs, bound)})"
    if isinstance(f, Fin):
        return f"fin({_term_shape(f.arg, bound)})"
    if isinstance(f, Not):
        return f"~{_shape(f.arg, bound)}"
    if isinstance(f, (And, Or)):
        tag = "&" if isinstance(f, And) else "|"
        return tag + "(" + ",".join(sorted(_shape(a, bound) for a in f.args)) + ")"
    if isinstance(f, (Implies, Iff)):
        tag = ">" if isinstance(f, Implies) else "<>"
        return f"{tag}({_shape(f.lhs, bound)},{_shape(f.rhs, bound)})"
    if isinstance(f, (Exists, Forall)):
        tag = "E" if isinstance(f, Exists) else "A"
        inner = bound | set(f.vars)
        return f"{tag}[{','.join(v.sort for v in f.vars)}]{_shape(f.body, inner)}"
    raise TypeError(f)


def _atom_rank(f: Formula) -> int:
    # equations first, then fin atoms, then everything else
    return 0 if isinstance(f, Eq) else 1 if isinstance(f, Fin) else 2


def canonicalize(f: Formula) -> Formula:
    """Alpha-rename bound variables to ``_v0, _v1, ...`` and sort conjuncts."""
    taken = {v.name for v in free_variables(f)}
    counter = itertools.count()

    def new_name(sort: str) -> Var:
        while True:
            name = f"_v{next(counter)}"
            if name not in taken:
                return Var(name, sort)

    def go(g: Formula, ren: dict[Var, Var], bound: frozenset) -> Formula:
        if isinstance(g, Eq):
            return Eq(subst_term(g.lhs, ren), subst_term(g.rhs, ren))
        if isinstance(g, Fin):
            return Fin(subst_term(g.arg, ren))
        if isinstance(g, Not):
            return Not(go(g.arg, ren, bound))
        if isinstance(g, (And, Or)):
            args = sorted(g.args, key=lambda a: (_atom_rank(a), _shape(a, bound)))
            return type(g)(tuple(go(a, ren, bound) for a in args))
        if isinstance(g, (Implies, Iff)):
            return type(g)(go(g.lhs, ren, bound), go(g.rhs, ren, bound))
        if isinstance(g, (Exists, Forall)):
            ren2 = dict(ren)
            nvs = []
            for v in g.vars:
                nv = new_name(v.sort)
                ren2[v] = nv
                nvs.append(nv)
            return type(g)(tuple(nvs), go(g.body, ren2, bound | set(g.vars)))
        return g

    return go(f, {}, frozenset())


def atom_key(a: Atom) -> tuple:
    if isinstance(a, EqAtom):
        rhs = a.rhs
        r = (0, rhs.name) if isinstance(rhs, Var) else (1, rhs.gen, tuple(x.name for x in rhs.args))
        return (0, a.lhs.name, r)
    return (1, a.var.name)
