"""Instantiable variables and their case splits."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .basic import _edges, _properly_reachable
from .errors import DepthError
from .formula import BasicFormula, Eq, EqAtom, Fin, FinAtom, FreshNames, NormalFormula
from .normalize import flatten_to_basic
from .signature import SortAnalysis, needed_u_equations
from .terms import App, Term, Var, subst_term, term_vars


@dataclass(frozen=True)
class Instantiation:
    target: Var
    condition: int
    cases: tuple[tuple[tuple[Var, ...], BasicFormula], ...]

    def __str__(self) -> str:
        parts = []
        for zs, psi in self.cases:
            q = f"∃{','.join(map(str, zs))}. " if zs else ""
            parts.append(q + str(psi))
        return f"{self.target} (condition {self.condition}): {{{'; '.join(parts)}}}"


def strip_common_conjuncts(alpha: BasicFormula, beta: BasicFormula) -> BasicFormula:
    return beta.without(alpha.atoms())


# A strategy orders the candidate variables; the default keeps v̄ then x̄.
Strategy = Callable[[Sequence[Var], Sequence[Var], NormalFormula], Sequence[Var]]


def default_order(free_vars: Sequence[Var], bound: Sequence[Var], phi: NormalFormula) -> Sequence[Var]:
    return [*free_vars, *bound]


def fresh_for(phi: NormalFormula, free_vars: Iterable[Var] = ()) -> FreshNames:
    """A fresh-name source whose names cannot clash with anything in ``phi``."""
    top = -1
    pat = re.compile(r"_v(\d+)$")

    def scan(n: NormalFormula) -> None:
        nonlocal top
        for v in (*n.bound, *n.alpha.variables()):
            m = pat.match(v.name)
            if m:
                top = max(top, int(m.group(1)))
        for c in n.children:
            scan(c)

    scan(phi)
    for v in free_vars:
        m = pat.match(v.name)
        if m:
            top = max(top, int(m.group(1)))
    return FreshNames(start=top + 1)


def _term_case(u: Var, t: Term, analysis: SortAnalysis, fresh: FreshNames) -> tuple[tuple[Var, ...], BasicFormula]:
    """``∃z̄. u = t ∧ U`` flattened, with the u-variables renamed apart."""
    ueqs = needed_u_equations(analysis, t)
    ren: dict[Var, Var] = {}
    for v in [*term_vars(t), *(lhs for lhs, _ in ueqs)]:
        if v.name.startswith("$u_") and v not in ren:
            ren[v] = fresh.var(v.sort)
    atoms = [Eq(u, subst_term(t, ren))]
    atoms += [Eq(ren[lhs], subst_term(rhs, ren)) for lhs, rhs in ueqs]
    new_vars, basic = flatten_to_basic(atoms, fresh)
    return tuple([*ren.values(), *new_vars]), basic


def instantiable_conditions(
    u: Var, phi: NormalFormula, analysis: SortAnalysis, stars: list[BasicFormula] | None = None
) -> list[int]:
    """Which of the four conditions make ``u`` instantiable in ``phi``."""
    alpha = phi.alpha
    betas = [c.alpha for c in phi.children]
    if stars is None:
        stars = [strip_common_conjuncts(alpha, b) for b in betas]
    s = u.sort
    out = []
    for b, bs in zip(betas, stars):
        if any(e.lhs == u and isinstance(e.rhs, App) for e in bs.eqs) and not _properly_reachable(u, _edges(b.eqs)):
            out.append(1)
            break
    occurs = any(bs.mentions(u) for bs in stars)
    if analysis.finite_domain(s) and occurs and u not in alpha.lhs_vars():
        out.append(2)
    if s in analysis.sff and u in alpha.fins and occurs:
        out.append(3)
    if s in analysis.sfi and any(not bs.eqs and u in bs.fins for bs in stars):
        out.append(4)
    return out


def find_instantiation(
    free_vars: Sequence[Var],
    phi: NormalFormula,
    analysis: SortAnalysis,
    fresh: FreshNames | None = None,
    strategy: Strategy | None = None,
) -> Instantiation | None:
    if phi.depth > 2:
        raise DepthError(f"find_instantiation needs depth <= 2, got {phi.depth}")
    if not phi.children:
        return None
    fresh = fresh or fresh_for(phi, free_vars)
    stars = [strip_common_conjuncts(phi.alpha, c.alpha) for c in phi.children]
    order = (strategy or default_order)(free_vars, phi.bound, phi)
    sig = analysis.signature
    for u in order:
        conds = instantiable_conditions(u, phi, analysis, stars)
        if not conds:
            continue
        cond = conds[0]
        s = u.sort
        cases: list[tuple[tuple[Var, ...], BasicFormula]] = []
        if cond == 1:
            for g in sig.gens_of(s):
                zs = tuple(fresh.var(a) for a in g.arg_sorts)
                cases.append((zs, BasicFormula((EqAtom(u, App(g.name, zs, s)),))))
        elif cond == 2:
            for t in (*analysis.fin_inhabitants[s], *analysis.infin_inhabitants[s]):
                cases.append(_term_case(u, t, analysis, fresh))
        elif cond == 3:
            for t in analysis.fin_inhabitants[s]:
                cases.append(_term_case(u, t, analysis, fresh))
        else:
            cases.append(((), BasicFormula((), (u,))))
            for t in analysis.infin_inhabitants[s]:
                cases.append(_term_case(u, t, analysis, fresh))
        return Instantiation(u, cond, tuple(cases))
    return None


def apply_instantiation(phi: NormalFormula, inst: Instantiation) -> list[NormalFormula]:
    """One normal formula per case; α ∧ ψ is left unsolved."""
    return [
        NormalFormula((*phi.bound, *zs), phi.alpha & psi, phi.children) for zs, psi in inst.cases
    ]


# -- termination measure ----------------------------------------------------------

def depth_in(v: Var, beta: BasicFormula) -> int:
    eqmap = beta.eq_map()
    edges = _edges(beta.eqs)
    memo: dict[Var, int] = {}

    def go(w: Var) -> int:
        if w in memo:
            return memo[w]
        rhs = eqmap.get(w)
        if rhs is None or _properly_reachable(w, edges):
            d = 0
        elif isinstance(rhs, Var):
            d = go(rhs)
        else:
            d = 1 + max((go(a) for a in rhs.args), default=0)  # type: ignore[arg-type]
        memo[w] = d
        return d

    return go(v)


def instantiation_measure(free_vars: Sequence[Var], phi: NormalFormula, analysis: SortAnalysis) -> dict[int, int]:
    """N(φ) as a map depth -> number of instantiable variables of that max depth."""
    out: dict[int, int] = {}
    stars = [strip_common_conjuncts(phi.alpha, c.alpha) for c in phi.children]
    for u in [*free_vars, *phi.bound]:
        if instantiable_conditions(u, phi, analysis, stars):
            d = max((depth_in(u, c.alpha) for c in phi.children), default=0)
            out[d] = out.get(d, 0) + 1
    return out


def measure_less(a: dict[int, int], b: dict[int, int]) -> bool:
    """Lexicographic comparison from the largest depth down."""
    for d in sorted(set(a) | set(b), reverse=True):
        x, y = a.get(d, 0), b.get(d, 0)
        if x != y:
            return x < y
    return False
