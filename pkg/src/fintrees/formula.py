"""First-order formulae, basic formulae and normal formulae."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import ArityError, SortError
from .signature import Signature
from .terms import App, Sel, Term, Var, term_vars


class Formula:
    """Marker base class for the formula AST."""

    __slots__ = ()

    def __str__(self) -> str:
        from .render import pretty

        return pretty(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class Eq(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Fin(Formula):
    arg: Term


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Iff(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Exists(Formula):
    vars: tuple[Var, ...]
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    vars: tuple[Var, ...]
    body: Formula


def conj(*fs: Formula) -> Formula:
    parts = [f for f in fs if not isinstance(f, Top)]
    if any(isinstance(f, Bottom) for f in parts):
        return FALSE
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def disj(*fs: Formula) -> Formula:
    parts = [f for f in fs if not isinstance(f, Bottom)]
    if any(isinstance(f, Top) for f in parts):
        return TRUE
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def exists(vs: Iterable[Var], body: Formula) -> Formula:
    vs = tuple(vs)
    return Exists(vs, body) if vs else body


# -- basic formulae -------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class EqAtom:
    lhs: Var
    rhs: Union[Var, App]  # App arguments are variables

    def vars(self) -> Iterator[Var]:
        yield self.lhs
        if isinstance(self.rhs, Var):
            yield self.rhs
        else:
            yield from self.rhs.args  # type: ignore[misc]

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True, slots=True)
class FinAtom:
    var: Var

    def vars(self) -> Iterator[Var]:
        yield self.var

    def __str__(self) -> str:
        return f"fin({self.var})"


Atom = Union[EqAtom, FinAtom]


@dataclass(frozen=True)
class BasicFormula:
    """Flat conjunction of equations and fin atoms."""

    eqs: tuple[EqAtom, ...] = ()
    fins: tuple[Var, ...] = ()
    _atoms: frozenset | None = field(default=None, repr=False, compare=False)

    def atoms(self) -> frozenset[Atom]:
        if self._atoms is None:
            object.__setattr__(
                self, "_atoms", frozenset(self.eqs) | frozenset(FinAtom(v) for v in self.fins)
            )
        return self._atoms  # type: ignore[return-value]

    def atom_list(self) -> list[Atom]:
        return [*self.eqs, *(FinAtom(v) for v in self.fins)]

    def __and__(self, other: "BasicFormula") -> "BasicFormula":
        return BasicFormula(self.eqs + other.eqs, self.fins + other.fins)

    def is_empty(self) -> bool:
        return not self.eqs and not self.fins

    def variables(self) -> list[Var]:
        out: dict[Var, None] = {}
        for e in self.eqs:
            for v in e.vars():
                out.setdefault(v)
        for v in self.fins:
            out.setdefault(v)
        return list(out)

    def eq_map(self) -> dict[Var, Union[Var, App]]:
        """lhs -> rhs; meaningful for solved formulae (distinct lhs)."""
        return {e.lhs: e.rhs for e in self.eqs}

    def lhs_vars(self) -> set[Var]:
        return {e.lhs for e in self.eqs}

    def mentions(self, v: Var) -> bool:
        return any(v in set(a.vars()) for a in self.atom_list())

    def without(self, atoms: Iterable[Atom]) -> "BasicFormula":
        drop = set(atoms)
        return BasicFormula(
            tuple(e for e in self.eqs if e not in drop),
            tuple(v for v in self.fins if FinAtom(v) not in drop),
        )

    def restricted(self, keep: "frozenset[Atom] | set[Atom]") -> "BasicFormula":
        return BasicFormula(
            tuple(e for e in self.eqs if e in keep),
            tuple(v for v in self.fins if FinAtom(v) in keep),
        )

    def to_formula(self) -> Formula:
        parts: list[Formula] = [Eq(e.lhs, e.rhs) for e in self.eqs]
        parts += [Fin(v) for v in self.fins]
        return conj(*parts)

    def __str__(self) -> str:
        parts = [str(a) for a in self.atom_list()]
        return " ∧ ".join(parts) if parts else "true"


@dataclass(frozen=True)
class NormalFormula:
    """``¬(∃bound. alpha ∧ ⋀ children)``."""

    bound: tuple[Var, ...]
    alpha: BasicFormula
    children: tuple["NormalFormula", ...] = ()
    depth: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "depth", 1 + max((c.depth for c in self.children), default=0)
        )

    def is_neg_true(self) -> bool:
        return not self.bound and self.alpha.is_empty() and not self.children

    def to_formula(self) -> Formula:
        """The formula this normal formula stands for."""
        return Not(self.body_formula())

    def body_formula(self) -> Formula:
        body = conj(self.alpha.to_formula(), *(c.to_formula() for c in self.children))
        return exists(self.bound, body)

    def __str__(self) -> str:
        inner = [str(self.alpha)] if not self.alpha.is_empty() or not self.children else []
        inner += [str(c) for c in self.children]
        q = f"∃{','.join(map(str, self.bound))}. " if self.bound else ""
        return f"¬({q}{' ∧ '.join(inner)})"


NEG_TRUE = NormalFormula((), BasicFormula(), ())


def formula_depth(n: NormalFormula) -> int:
    return n.depth


# -- traversal helpers --------------------------------------------------------

def atoms_of(f: Formula) -> Iterator[Formula]:
    if isinstance(f, (Eq, Fin)):
        yield f
    elif isinstance(f, Not):
        yield from atoms_of(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from atoms_of(a)
    elif isinstance(f, (Implies, Iff)):
        yield from atoms_of(f.lhs)
        yield from atoms_of(f.rhs)
    elif isinstance(f, (Exists, Forall)):
        yield from atoms_of(f.body)


def free_variables(f: "Formula | NormalFormula | BasicFormula") -> list[Var]:
    """Free variables in first-occurrence order."""
    out: dict[Var, None] = {}

    def visit_terms(ts: Iterable[Term], bound: frozenset) -> None:
        for t in ts:
            for v in term_vars(t):
                if v not in bound:
                    out.setdefault(v)

    def go(g: Formula, bound: frozenset) -> None:
        if isinstance(g, Eq):
            visit_terms((g.lhs, g.rhs), bound)
        elif isinstance(g, Fin):
            visit_terms((g.arg,), bound)
        elif isinstance(g, Not):
            go(g.arg, bound)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                go(a, bound)
        elif isinstance(g, (Implies, Iff)):
            go(g.lhs, bound)
            go(g.rhs, bound)
        elif isinstance(g, (Exists, Forall)):
            go(g.body, bound | set(g.vars))

    def go_basic(b: BasicFormula, bound: frozenset) -> None:
        for v in b.variables():
            if v not in bound:
                out.setdefault(v)

    def go_normal(n: NormalFormula, bound: frozenset) -> None:
        inner = bound | set(n.bound)
        go_basic(n.alpha, inner)
        for c in n.children:
            go_normal(c, inner)

    if isinstance(f, NormalFormula):
        go_normal(f, frozenset())
    elif isinstance(f, BasicFormula):
        go_basic(f, frozenset())
    else:
        go(f, frozenset())
    return list(out)


def quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Exists, Forall)):
        return False
    if isinstance(f, Not):
        return quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(quantifier_free(a) for a in f.args)
    if isinstance(f, (Implies, Iff)):
        return quantifier_free(f.lhs) and quantifier_free(f.rhs)
    return True


def node_count(f: Formula) -> int:
    if isinstance(f, Not):
        return 1 + node_count(f.arg)
    if isinstance(f, (And, Or)):
        return 1 + sum(node_count(a) for a in f.args)
    if isinstance(f, (Implies, Iff)):
        return 1 + node_count(f.lhs) + node_count(f.rhs)
    if isinstance(f, (Exists, Forall)):
        return 1 + node_count(f.body)
    return 1


# -- sort checking ------------------------------------------------------------

def check_term(t: Term, sig: Signature, selectors: dict | None = None) -> str:
    """Return the sort of ``t`` or raise SortError."""
    if isinstance(t, Var):
        if t.sort not in sig.sorts:
            raise SortError(f"variable {t.name} has unknown sort {t.sort}")
        return t.sort
    if isinstance(t, App):
        if not sig.has_generator(t.gen):
            raise SortError(f"unknown generator {t.gen}")
        g = sig.generator(t.gen)
        if len(t.args) != g.arity:
            raise ArityError(f"{t.gen} expects {g.arity} arguments, got {len(t.args)}")
        for a, want in zip(t.args, g.arg_sorts):
            got = check_term(a, sig, selectors)
            if got != want:
                raise SortError(f"argument of {t.gen} has sort {got}, expected {want}")
        if t.sort != g.result_sort:
            raise SortError(f"{t.gen} has sort {g.result_sort}, annotated {t.sort}")
        return g.result_sort
    if isinstance(t, Sel):
        if not selectors or t.selector not in selectors:
            raise SortError(f"unknown selector {t.selector}")
        info = selectors[t.selector]
        got = check_term(t.arg, sig, selectors)
        if got != info.domain:
            raise SortError(f"selector {t.selector} applied to {got}, expected {info.domain}")
        return info.result
    raise SortError(f"not a term: {t!r}")


def check_formula(f: Formula, sig: Signature, selectors: dict | None = None) -> None:
    if isinstance(f, Eq):
        a = check_term(f.lhs, sig, selectors)
        b = check_term(f.rhs, sig, selectors)
        if a != b:
            raise SortError(f"equation between sorts {a} and {b}: {f}")
    elif isinstance(f, Fin):
        check_term(f.arg, sig, selectors)
    elif isinstance(f, Not):
        check_formula(f.arg, sig, selectors)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            check_formula(a, sig, selectors)
    elif isinstance(f, (Implies, Iff)):
        check_formula(f.lhs, sig, selectors)
        check_formula(f.rhs, sig, selectors)
    elif isinstance(f, (Exists, Forall)):
        if not f.vars:
            raise SortError("empty binder list")
        if len(set(f.vars)) != len(f.vars) or len({v.name for v in f.vars}) != len(f.vars):
            raise SortError("duplicate bound variable")
        for v in f.vars:
            check_term(v, sig, selectors)
        check_formula(f.body, sig, selectors)
    elif not isinstance(f, (Top, Bottom)):
        raise SortError(f"not a formula: {f!r}")


# -- fresh names ----------------------------------------------------------------

class FreshNames:
    """Monotone counter producing ``_v<n>`` names; one per solve."""

    def __init__(self, prefix: str = "_v", start: int = 0):
        self.prefix = prefix
        self._count = itertools.count(start)

    def var(self, sort: str) -> Var:
        return Var(f"{self.prefix}{next(self._count)}", sort)
