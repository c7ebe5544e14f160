"""Multi-sorted signatures and the fixed-point sort analyses.

``compute_zero_sets`` finds the sorts without finite trees (S_0F) and without
infinite trees (S_0I).  ``compute_finite_sets`` finds the sorts with finitely
many finite trees (S_FF), exactly one infinite tree (S_1I) and finitely many
infinite trees (S_FI), together with explicit inhabitant term sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import DuplicateName, EmptySort, InfiniteDomain, SingularSort, UnknownSort
from .terms import App, Term, Var, term_vars, u_var
from .trees import RationalTree


@dataclass(frozen=True)
class Generator:
    name: str
    arg_sorts: tuple[str, ...]
    result_sort: str

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __str__(self) -> str:
        if not self.arg_sorts:
            return f"{self.name}: {self.result_sort}"
        return f"{self.name}: {' x '.join(self.arg_sorts)} -> {self.result_sort}"


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...]
    generators: tuple[Generator, ...]
    _by_name: Mapping[str, Generator] = field(init=False, repr=False, compare=False)
    _by_sort: Mapping[str, tuple[Generator, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_name = {g.name: g for g in self.generators}
        by_sort: dict[str, list[Generator]] = {s: [] for s in self.sorts}
        for g in self.generators:
            by_sort.setdefault(g.result_sort, []).append(g)
        object.__setattr__(self, "_by_name", MappingProxyType(by_name))
        object.__setattr__(
            self, "_by_sort", MappingProxyType({s: tuple(gs) for s, gs in by_sort.items()})
        )

    def gens_of(self, sort: str) -> tuple[Generator, ...]:
        """F_s in declaration order."""
        return self._by_sort.get(sort, ())

    def generator(self, name: str) -> Generator:
        return self._by_name[name]

    def has_generator(self, name: str) -> bool:
        return name in self._by_name

    def sort_of_gen(self) -> Mapping[str, str]:
        return {g.name: g.result_sort for g in self.generators}

    def restrict(self, sorts: Iterable[str]) -> "Signature":
        keep = set(sorts)
        return Signature(
            tuple(s for s in self.sorts if s in keep),
            tuple(g for g in self.generators if g.result_sort in keep),
        )


def make_signature(sorts: Iterable[str], gens: Iterable[tuple]) -> Signature:
    """Convenience builder: ``gens`` holds ``(name, arg_sorts, result_sort)`` triples."""
    return Signature(
        tuple(sorts), tuple(Generator(n, tuple(a), r) for n, a, r in gens)
    )


def validate_signature(sig: Signature, require_two: bool = True) -> Signature:
    seen: set[str] = set()
    for s in sig.sorts:
        if s in seen:
            raise DuplicateName(s)
        seen.add(s)
    names: set[str] = set()
    for g in sig.generators:
        if g.name in names or g.name in seen:
            raise DuplicateName(g.name)
        names.add(g.name)
        for s in (*g.arg_sorts, g.result_sort):
            if s not in seen:
                raise UnknownSort(s)
    for s in sig.sorts:
        n = len(sig.gens_of(s))
        if n == 0:
            raise EmptySort(s)
        if n == 1 and require_two:
            raise SingularSort(s)
    return sig


# -- empty finite/infinite parts --------------------------------------------------

def compute_zero_sets(sig: Signature) -> tuple[frozenset[str], frozenset[str]]:
    """Return ``(s0f, s0i)``."""
    s0i: set[str] = set()
    s0f: set[str] = set(sig.sorts)
    changed = True
    while changed:
        changed = False
        for s in sig.sorts:
            gens = sig.gens_of(s)
            if s not in s0i and all(a in s0i for g in gens for a in g.arg_sorts):
                s0i.add(s)
                changed = True
            if s in s0f and any(all(a not in s0f for a in g.arg_sorts) for g in gens):
                s0f.discard(s)
                changed = True
    return frozenset(s0f), frozenset(s0i)


# -- finite sets of trees --------------------------------------------------------

@dataclass(frozen=True)
class SortAnalysis:
    s0f: frozenset[str]
    s0i: frozenset[str]
    sff: frozenset[str]
    s1i: frozenset[str]
    sfi: frozenset[str]
    fin_inhabitants: Mapping[str, tuple[Term, ...]]
    infin_inhabitants: Mapping[str, tuple[Term, ...]]
    unique_infinite_eqs: Mapping[str, tuple[tuple[Var, App], ...]]
    signature: Signature = field(repr=False, compare=False)

    def has_finite_and_infinite(self, sort: str) -> bool:
        return sort not in self.s0f and sort not in self.s0i

    def finite_domain(self, sort: str) -> bool:
        return sort in self.sff and sort in self.sfi

    def u_equations(self, sort: str) -> tuple[tuple[Var, App], ...]:
        return self.unique_infinite_eqs.get(sort, ())

    def to_json(self) -> dict:
        def terms(m: Mapping[str, tuple[Term, ...]]) -> dict:
            return {s: [str(t) for t in ts] for s, ts in m.items()}

        return {
            "S0F": sorted(self.s0f),
            "S0I": sorted(self.s0i),
            "SFF": sorted(self.sff),
            "S1I": sorted(self.s1i),
            "SFI": sorted(self.sfi),
            "fin": terms({s: self.fin_inhabitants[s] for s in sorted(self.sff)}),
            "infin": terms({s: self.infin_inhabitants[s] for s in sorted(self.sfi)}),
            "U": {
                s: [f"{v} = {t}" for v, t in self.unique_infinite_eqs[s]]
                for s in sorted(self.s1i)
            },
        }


def _dedupe(items: Iterable[Term]) -> tuple[Term, ...]:
    return tuple(dict.fromkeys(items))


def compute_finite_sets(sig: Signature) -> SortAnalysis:
    s0f, s0i = compute_zero_sets(sig)
    sorts = sig.sorts

    # first loop: S_FF with s_fin, S_1I with U_s
    sff: set[str] = set(s0f)
    fin: dict[str, tuple[Term, ...]] = {s: () for s in sorts}
    s1i: set[str] = set(sorts) - s0i
    useqs: dict[str, tuple[tuple[Var, App], ...]] = {s: () for s in sorts}
    changed = True
    while changed:
        changed = False
        for s in sorts:
            gens = sig.gens_of(s)
            finite_gens = [g for g in gens if not any(a in s0f for a in g.arg_sorts)]
            if all(a in sff for g in finite_gens for a in g.arg_sorts):
                new_fin = _dedupe(
                    App(g.name, tuple(args), s)
                    for g in finite_gens
                    for args in itertools.product(*(fin[a] for a in g.arg_sorts))
                )
                if s not in sff or new_fin != fin[s]:
                    sff.add(s)
                    fin[s] = new_fin
                    changed = True
            if s in s1i:
                chosen = None
                for g in gens:
                    if g.arity == 1 and g.arg_sorts[0] in s1i and all(
                        a in s0i for h in gens if h is not g for a in h.arg_sorts
                    ):
                        chosen = g
                        break
                if chosen is None:
                    s1i.discard(s)
                    useqs[s] = ()
                    changed = True
                else:
                    arg = chosen.arg_sorts[0]
                    own = (u_var(s), App(chosen.name, (u_var(arg),), s))
                    new_u = tuple(dict.fromkeys((own, *useqs[arg])))
                    if new_u != useqs[s]:
                        useqs[s] = new_u
                        changed = True

    # second loop: S_FI with s_infin
    sfi: set[str] = set(s0i) | s1i
    infin: dict[str, tuple[Term, ...]] = {s: () for s in sorts}
    for s in s1i:
        infin[s] = (u_var(s),)
    fixed = set(sfi)  # S_0I and S_1I keep their initial inhabitant sets
    changed = True
    rounds = 0
    while changed:
        changed = False
        rounds += 1
        if rounds > 10 * (len(sorts) + 1) ** 2:
            raise RuntimeError("S_FI fixed point did not converge")
        for s in sorts:
            if s in fixed:
                continue
            inf_gens = [g for g in sig.gens_of(s) if any(a not in s0i for a in g.arg_sorts)]
            ok = all(
                a in s0i
                or (a in sfi and all(b in sff and b in sfi for j, b in enumerate(g.arg_sorts) if j != i))
                for g in inf_gens
                for i, a in enumerate(g.arg_sorts)
            )
            if not ok:
                continue
            terms = []
            for g in inf_gens:
                for args in itertools.product(*(fin[a] + infin[a] for a in g.arg_sorts)):
                    if any(r not in fin[a] for r, a in zip(args, g.arg_sorts)):
                        terms.append(App(g.name, tuple(args), s))
            new_inf = _dedupe(terms)
            if s not in sfi or new_inf != infin[s]:
                sfi.add(s)
                infin[s] = new_inf
                changed = True

    return SortAnalysis(
        s0f=frozenset(s0f),
        s0i=frozenset(s0i),
        sff=frozenset(sff),
        s1i=frozenset(s1i),
        sfi=frozenset(sfi),
        fin_inhabitants=MappingProxyType({s: fin[s] for s in sorts if s in sff}),
        infin_inhabitants=MappingProxyType({s: infin[s] for s in sorts if s in sfi}),
        unique_infinite_eqs=MappingProxyType({s: useqs[s] for s in sorts if s in s1i}),
        signature=sig,
    )


def analyze(sig: Signature) -> SortAnalysis:
    """Validate and analyse in one step."""
    return compute_finite_sets(validate_signature(sig))


def needed_u_equations(analysis: SortAnalysis, t: Term) -> list[tuple[Var, App]]:
    """U-equations transitively needed to define the u-variables occurring in ``t``."""
    todo = [v for v in term_vars(t) if v.name.startswith("$u_")]
    seen: set[Var] = set()
    out: list[tuple[Var, App]] = []
    while todo:
        v = todo.pop()
        if v in seen:
            continue
        seen.add(v)
        for lhs, rhs in analysis.u_equations(v.sort):
            if lhs == v:
                out.append((lhs, rhs))
                todo.extend(term_vars(rhs))
    return out


def inhabitant_tree(analysis: SortAnalysis, t: Term) -> RationalTree:
    """Resolve an inhabitant term (possibly mentioning u-variables) to a tree."""
    eqs = needed_u_equations(analysis, t)
    if not eqs:
        return RationalTree.from_term(t)
    env = RationalTree.from_system(dict(eqs), [lhs for lhs, _ in eqs])
    return RationalTree.from_term(t, env)


def enumerate_domain(sig: Signature, analysis: SortAnalysis, sort: str) -> list[RationalTree]:
    """All trees of a finite-domain sort, finite ones first."""
    if not analysis.finite_domain(sort):
        raise InfiniteDomain(sort)
    out = [RationalTree.from_term(t) for t in analysis.fin_inhabitants[sort]]
    out += [inhabitant_tree(analysis, t) for t in analysis.infin_inhabitants[sort]]
    return list(dict.fromkeys(out))
