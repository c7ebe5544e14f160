"""Algebraic datatypes and codatatypes on top of the tree theory.

Declarations are turned into a tree signature (constructors become
generators).  Formulae may use selectors; they are removed either under
default-value semantics (an equivalent formula) or under standard semantics
(an equisatisfiable one, quantifier-free input only).  ``embed_in_trees``
finally adds the ``fin`` guards that make datatype variables range over
finite trees only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateName,
    MissingDefault,
    MixedDeclaration,
    NonWellFounded,
    QuantifiedInput,
    UnknownSort,
)
from .formula import (
    TRUE,
    And,
    Bottom,
    Eq,
    Exists,
    Fin,
    Forall,
    Formula,
    FreshNames,
    Iff,
    Implies,
    Not,
    Or,
    Top,
    conj,
    free_variables,
    quantifier_free,
)
from .signature import Signature, SortAnalysis, compute_zero_sets, make_signature, validate_signature
from .terms import App, Sel, Term, Var, map_term
from .trees import RationalTree

DATATYPE = "datatype"
CODATATYPE = "codatatype"


@dataclass(frozen=True)
class Constructor:
    name: str
    selectors: tuple[tuple[str, str], ...] = ()  # (selector name, argument sort)


@dataclass(frozen=True)
class DatatypeDecl:
    name: str
    kind: str
    constructors: tuple[Constructor, ...]


@dataclass(frozen=True)
class SelectorInfo:
    name: str
    constructor: str
    index: int  # 1-based position among the constructor's arguments
    domain: str
    result: str


@dataclass(frozen=True)
class DatatypeSignature:
    decls: tuple[DatatypeDecl, ...]
    signature: Signature
    selectors: Mapping[str, SelectorInfo]
    kinds: Mapping[str, str] = field(default_factory=dict)

    def is_datatype(self, sort: str) -> bool:
        return self.kinds.get(sort) == DATATYPE

    def constructor(self, name: str) -> Constructor:
        for d in self.decls:
            for c in d.constructors:
                if c.name == name:
                    return c
        raise KeyError(name)

    def selector_for(self, ctor: str, index: int) -> SelectorInfo:
        for s in self.selectors.values():
            if s.constructor == ctor and s.index == index:
                return s
        raise KeyError((ctor, index))


# DefaultValueTable: (constructor, 1-based index) -> closed tree
DefaultValueTable = dict[tuple[str, int], RationalTree]


def check_declarations(decls: Sequence[DatatypeDecl]) -> DatatypeSignature:
    kinds: dict[str, str] = {}
    for d in decls:
        if d.name in kinds:
            raise DuplicateName(d.name)
        if d.kind not in (DATATYPE, CODATATYPE):
            raise ValueError(f"unknown declaration kind {d.kind!r}")
        kinds[d.name] = d.kind
    gens: list[tuple] = []
    selectors: dict[str, SelectorInfo] = {}
    for d in decls:
        for c in d.constructors:
            for i, (sel, arg) in enumerate(c.selectors, start=1):
                if arg not in kinds:
                    raise UnknownSort(arg)
                if kinds[arg] != d.kind:
                    raise MixedDeclaration(
                        f"{d.kind} {d.name} refers to {kinds[arg]} {arg} in constructor {c.name}"
                    )
                if sel in selectors or sel in kinds:
                    raise DuplicateName(sel)
                selectors[sel] = SelectorInfo(sel, c.name, i, d.name, arg)
            gens.append((c.name, tuple(a for _, a in c.selectors), d.name))
    sig = validate_signature(make_signature([d.name for d in decls], gens), require_two=False)
    ctor_names = {g[0] for g in gens}
    clash = ctor_names & set(selectors)
    if clash:
        raise DuplicateName(sorted(clash)[0])
    data = [d.name for d in decls if d.kind == DATATYPE]
    if data:
        s0f, _ = compute_zero_sets(sig.restrict(data))
        bad = [s for s in data if s in s0f]
        if bad:
            raise NonWellFounded(bad[0])
    return DatatypeSignature(tuple(decls), sig, selectors, kinds)


# -- default values ---------------------------------------------------------------

def default_value_for(sort: str, analysis: SortAnalysis, sig: Signature | None = None) -> RationalTree:
    """Smallest finite tree of ``sort``, or a cycle through the smallest generator."""
    sig = sig or analysis.signature
    depth = _min_depths(sig)
    if depth.get(sort) is not None:
        return _min_finite(sig, sort, depth)
    # no finite trees: w_s = g_s(...) for the smallest generator of every such sort
    eqs: dict[Var, Term] = {}
    env: dict[Var, RationalTree] = {}
    todo = [sort]
    while todo:
        s = todo.pop()
        w = Var(f"w_{s}", s)
        if w in eqs:
            continue
        g = min(sig.gens_of(s), key=lambda g: g.name)
        args = []
        for a in g.arg_sorts:
            v = Var(f"w_{a}", a)
            if depth.get(a) is None:
                todo.append(a)
            elif v not in env:
                env[v] = _min_finite(sig, a, depth)
            args.append(v)
        eqs[w] = App(g.name, tuple(args), s)
    return RationalTree.from_system(eqs, [Var(f"w_{sort}", sort)], env)[Var(f"w_{sort}", sort)]


def _min_depths(sig: Signature) -> dict[str, int | None]:
    depth: dict[str, int | None] = {s: None for s in sig.sorts}
    changed = True
    while changed:
        changed = False
        for g in sig.generators:
            ds = [depth[a] for a in g.arg_sorts]
            if any(d is None for d in ds):
                continue
            d = 1 + max(ds, default=0)  # type: ignore[type-var]
            cur = depth[g.result_sort]
            if cur is None or d < cur:
                depth[g.result_sort] = d
                changed = True
    return depth


def _min_finite(sig: Signature, sort: str, depth: Mapping[str, int | None]) -> RationalTree:
    best = depth[sort]
    for g in sorted(sig.gens_of(sort), key=lambda g: g.name):
        ds = [depth[a] for a in g.arg_sorts]
        if all(d is not None for d in ds) and 1 + max(ds, default=0) == best:  # type: ignore[type-var]
            return RationalTree.apply(g.name, [_min_finite(sig, a, depth) for a in g.arg_sorts])
    raise AssertionError(f"no minimal generator for {sort}")


def default_table(dsig: DatatypeSignature, analysis: SortAnalysis, explicit: Mapping[tuple[str, int], RationalTree] | None = None) -> DefaultValueTable:
    """Explicit entries win; the rest is filled with ``default_value_for``."""
    out: DefaultValueTable = {}
    for s in dsig.selectors.values():
        key = (s.constructor, s.index)
        out[key] = (explicit or {}).get(key) or default_value_for(s.result, analysis, dsig.signature)
    return out


def tree_equation(x: Var, tree: RationalTree, fresh: FreshNames, sort_of_gen: Mapping[str, str]) -> Formula:
    """``x = tree`` as a formula; cyclic trees become ``∃w̄`` with flat equations."""
    if tree.is_finite():
        return Eq(x, tree.to_term(sort_of_gen))
    t = tree.trimmed()
    ws = [fresh.var(sort_of_gen[g]) for g, _ in t.nodes]
    eqs = [Eq(ws[i], App(g, tuple(ws[k] for k in ks), sort_of_gen[g])) for i, (g, ks) in enumerate(t.nodes)]
    return Exists(tuple(ws), conj(Eq(x, ws[t.root]), *eqs))


# -- selector elimination -----------------------------------------------------------

def _innermost_selector(t: Term) -> Sel | None:
    if isinstance(t, Sel):
        inner = _innermost_selector(t.arg)
        return inner or t
    if isinstance(t, App):
        for a in t.args:
            found = _innermost_selector(a)
            if found is not None:
                return found
    return None


def _replace(t: Term, target: Sel, by: Var) -> Term:
    return map_term(t, lambda s: by if s == target else None)


def _atom_selector(f: Formula) -> Sel | None:
    if isinstance(f, Eq):
        return _innermost_selector(f.lhs) or _innermost_selector(f.rhs)
    if isinstance(f, Fin):
        return _innermost_selector(f.arg)
    return None


def _replace_in_atom(f: Formula, target: Sel, by: Var) -> Formula:
    if isinstance(f, Eq):
        return Eq(_replace(f.lhs, target, by), _replace(f.rhs, target, by))
    return Fin(_replace(f.arg, target, by))  # type: ignore[attr-defined]


def _map_atoms(f: Formula, fn) -> Formula:
    if isinstance(f, (Eq, Fin)):
        return fn(f)
    if isinstance(f, Not):
        return Not(_map_atoms(f.arg, fn))
    if isinstance(f, And):
        return And(tuple(_map_atoms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_map_atoms(a, fn) for a in f.args))
    if isinstance(f, Implies):
        return Implies(_map_atoms(f.lhs, fn), _map_atoms(f.rhs, fn))
    if isinstance(f, Iff):
        return Iff(_map_atoms(f.lhs, fn), _map_atoms(f.rhs, fn))
    if isinstance(f, Exists):
        return Exists(f.vars, _map_atoms(f.body, fn))
    if isinstance(f, Forall):
        return Forall(f.vars, _map_atoms(f.body, fn))
    return f


def _ctor_vars(dsig: DatatypeSignature, info: SelectorInfo, fresh: FreshNames) -> tuple[Var, ...]:
    c = dsig.constructor(info.constructor)
    return tuple(fresh.var(a) for _, a in c.selectors)


def _fresh_source(f: Formula, prefix: str) -> FreshNames:
    top = -1
    names = {v.name for v in free_variables(f)}
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Exists, Forall)):
            names |= {v.name for v in g.vars}
            stack.append(g.body)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
        elif isinstance(g, (Implies, Iff)):
            stack += [g.lhs, g.rhs]
    for n in names:
        if n.startswith(prefix) and n[len(prefix):].isdigit():
            top = max(top, int(n[len(prefix):]))
    return FreshNames(prefix, top + 1)


def eliminate_selectors_default(
    f: Formula, dsig: DatatypeSignature, defaults: Mapping[tuple[str, int], RationalTree]
) -> Formula:
    """An equivalent selector-free formula under default-value semantics."""
    fresh = _fresh_source(f, "_s")
    sort_of_gen = dsig.signature.sort_of_gen()

    def expand(x: Var, sel: Sel) -> Formula:
        info = dsig.selectors[sel.selector]
        key = (info.constructor, info.index)
        if key not in defaults:
            raise MissingDefault(info.constructor, info.name)
        vs = _ctor_vars(dsig, info, fresh)
        is_c = Exists(vs, Eq(sel.arg, App(info.constructor, vs, info.domain)))
        vs2 = _ctor_vars(dsig, info, fresh)
        hit = Exists(vs2, And((Eq(sel.arg, App(info.constructor, vs2, info.domain)), Eq(x, vs2[info.index - 1]))))
        miss = And((Not(is_c), tree_equation(x, defaults[key], fresh, sort_of_gen)))
        return Or((hit, miss))

    def atom(a: Formula) -> Formula:
        sel = _atom_selector(a)
        if sel is None:
            return a
        x = fresh.var(sel.sort)
        return Exists((x,), And((atom(_replace_in_atom(a, sel, x)), expand(x, sel))))

    return _map_atoms(f, atom)


def eliminate_selectors_standard(f: Formula, dsig: DatatypeSignature) -> Formula:
    """An equisatisfiable selector-free formula under standard semantics."""
    if not quantifier_free(f):
        raise QuantifiedInput()
    fresh = _fresh_source(f, "_s")
    defs: list[tuple[Var, Sel]] = []  # v_j = s_j(t_j), t_j selector-free
    by_term: dict[Sel, Var] = {}
    g = f
    while True:
        found: list[Sel] = []

        def collect(a: Formula) -> Formula:
            sel = _atom_selector(a)
            if sel is not None and sel not in found:
                found.append(sel)
            return a

        _map_atoms(g, collect)
        if not found:
            break
        for sel in found:
            if sel not in by_term:
                v = fresh.var(sel.sort)
                by_term[sel] = v
                defs.append((v, sel))
            v = by_term[sel]
            g = _map_atoms(g, lambda a, sel=sel, v=v: _replace_in_atom(a, sel, v) if _contains(a, sel) else a)
    parts: list[Formula] = []
    for j, (v, sel) in enumerate(defs):
        info = dsig.selectors[sel.selector]
        zs = _ctor_vars(dsig, info, fresh)
        psi = Forall(zs, Implies(Eq(sel.arg, App(info.constructor, zs, info.domain)), Eq(zs[info.index - 1], v)))
        chi = [
            Implies(Eq(sel.arg, other.arg), Eq(v, w))
            for w, other in defs[j + 1 :]
            if other.selector == sel.selector
        ]
        parts.append(psi)
        parts.extend(chi)
    return conj(*parts, g) if parts else g


def _contains(a: Formula, sel: Sel) -> bool:
    def has(t: Term) -> bool:
        if t == sel:
            return True
        if isinstance(t, App):
            return any(has(x) for x in t.args)
        if isinstance(t, Sel):
            return has(t.arg)
        return False

    if isinstance(a, Eq):
        return has(a.lhs) or has(a.rhs)
    if isinstance(a, Fin):
        return has(a.arg)
    return False


def has_selectors(f: Formula) -> bool:
    found = []
    _map_atoms(f, lambda a: found.append(a) or a if _atom_selector(a) is not None else a)
    return bool(found)


# -- embedding ----------------------------------------------------------------------

def embed_in_trees(f: Formula, dsig: DatatypeSignature) -> Formula:
    """Guard every datatype variable with ``fin`` (∀ becomes ¬∃¬ first)."""

    def guards(vs: Iterable[Var]) -> list[Formula]:
        return [Fin(v) for v in vs if dsig.is_datatype(v.sort)]

    def go(g: Formula) -> Formula:
        if isinstance(g, (Top, Bottom, Eq, Fin)):
            return g
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, And):
            return And(tuple(go(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(go(a) for a in g.args))
        if isinstance(g, Implies):
            return Implies(go(g.lhs), go(g.rhs))
        if isinstance(g, Iff):
            return Iff(go(g.lhs), go(g.rhs))
        if isinstance(g, Exists):
            gs = guards(g.vars)
            body = go(g.body)
            return Exists(g.vars, And((*gs, body)) if gs else body)
        if isinstance(g, Forall):
            return go(Not(Exists(g.vars, Not(g.body))))
        raise TypeError(g)

    top = guards(free_variables(f))
    body = go(f)
    return And((*top, body)) if top else body


# -- frontend oracle helpers -----------------------------------------------------------

def truncated_domain(sig: Signature, sort: str, depth: int) -> list[RationalTree]:
    """All finite trees of ``sort`` with height at most ``depth`` (leaves have height 1)."""
    memo: dict[tuple[str, int], list[RationalTree]] = {}

    def go(s: str, d: int) -> list[RationalTree]:
        key = (s, d)
        if key in memo:
            return memo[key]
        out: list[RationalTree] = []
        if d > 0:
            for g in sig.gens_of(s):
                kids = [go(a, d - 1) for a in g.arg_sorts]
                for combo in itertools.product(*kids):
                    out.append(RationalTree.apply(g.name, combo))
        memo[key] = out
        return out

    return list(dict.fromkeys(go(sort, depth)))


def default_interpretation(dsig: DatatypeSignature, defaults: Mapping[tuple[str, int], RationalTree]):
    """Selector semantics with fixed default values on the wrong constructor."""

    def sel(name: str, tree: RationalTree) -> RationalTree:
        info = dsig.selectors[name]
        if tree.gen == info.constructor:
            return tree.children()[info.index - 1]
        return defaults[(info.constructor, info.index)]

    return sel


class _Need(Exception):
    def __init__(self, key):
        self.key = key


def satisfiable_standard(
    f: Formula,
    dsig: DatatypeSignature,
    domain_of,
) -> bool:
    """Brute-force satisfiability under standard semantics.

    Free variables range over ``domain_of``; each selector is an arbitrary
    function on wrong-constructor arguments, explored lazily point by point.
    """
    from .oracle import all_valuations, eval_formula

    fv = free_variables(f)

    def search(val, table) -> bool:
        def sel(name: str, tree: RationalTree) -> RationalTree:
            info = dsig.selectors[name]
            if tree.gen == info.constructor:
                return tree.children()[info.index - 1]
            key = (name, tree)
            if key not in table:
                raise _Need(key)
            return table[key]

        try:
            return eval_formula(f, val, domain_of, sel)
        except _Need as need:
            result_sort = dsig.selectors[need.key[0]].result
            return any(search(val, {**table, need.key: v}) for v in domain_of(result_sort))

    return any(search(val, {}) for val in all_valuations(fv, domain_of))
