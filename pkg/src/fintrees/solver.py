"""The main simplification procedure and the fully-simplified-form checker."""

from __future__ import annotations

import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .basic import reachable_from, solve_basic, solved_basic_violations
from .errors import DepthError
from .formula import (
    FALSE,
    TRUE,
    And,
    BasicFormula,
    Bottom,
    Eq,
    EqAtom,
    Exists,
    Fin,
    FinAtom,
    Formula,
    FreshNames,
    NormalFormula,
    Not,
    Top,
    conj,
    disj,
    exists,
    free_variables,
)
from .instantiation import (
    Instantiation,
    Strategy,
    apply_instantiation,
    find_instantiation,
    fresh_for,
    instantiation_measure,
    measure_less,
    strip_common_conjuncts,
)
from .normalize import normalize_negation
from .signature import Signature, SortAnalysis
from .stats import Stats
from .terms import App, Var, subst_term


@dataclass
class SolveContext:
    analysis: SortAnalysis
    fresh: FreshNames
    stats: Stats = field(default_factory=Stats)
    strategy: Strategy | None = None
    trace: list[Instantiation] | None = None
    debug: bool = False
    measure_increases: list[tuple[dict, dict]] = field(default_factory=list)


# -- outcome types ----------------------------------------------------------------

@dataclass(frozen=True)
class SolvedDisjunct:
    """``∃x̄. α ∧ ⋀¬(∃ȳ. β)``, kept as the solved normal formula it negates."""

    normal: NormalFormula
    free_vars: tuple[Var, ...]

    def formula(self, strip: bool = True) -> Formula:
        n = self.normal
        kids = []
        for c in n.children:
            beta = strip_common_conjuncts(n.alpha, c.alpha) if strip else c.alpha
            kids.append(Not(exists(c.bound, beta.to_formula())))
        return exists(n.bound, conj(n.alpha.to_formula(), *kids))

    def __str__(self) -> str:
        return str(self.formula())


@dataclass(frozen=True)
class SolveOutcome:
    status: str  # "true" | "false" | "disjunction"
    disjuncts: tuple[SolvedDisjunct, ...] = ()
    free_vars: tuple[Var, ...] = ()

    @property
    def is_true(self) -> bool:
        return self.status == "true"

    @property
    def is_false(self) -> bool:
        return self.status == "false"

    def formula(self, strip: bool = True) -> Formula:
        if self.status == "true":
            return TRUE
        if self.status == "false":
            return FALSE
        return disj(*(d.formula(strip) for d in self.disjuncts))

    def __str__(self) -> str:
        return str(self.formula())


# -- helpers ------------------------------------------------------------------------

def _rename_basic(b: BasicFormula, ren: dict[Var, Var]) -> BasicFormula:
    if not ren:
        return b
    eqs = tuple(EqAtom(ren.get(e.lhs, e.lhs), subst_term(e.rhs, ren)) for e in b.eqs)  # type: ignore[arg-type]
    return BasicFormula(eqs, tuple(ren.get(v, v) for v in b.fins))


def rename_bound(n: NormalFormula, fresh: FreshNames, ren: dict[Var, Var] | None = None) -> NormalFormula:
    """Rename every bound variable of ``n`` apart."""
    ren = dict(ren or {})
    for v in n.bound:
        ren[v] = fresh.var(v.sort)
    return NormalFormula(
        tuple(ren[v] for v in n.bound),
        _rename_basic(n.alpha, ren),
        tuple(rename_bound(c, fresh, ren) for c in n.children),
    )


def _reuse_alpha_rhs(beta: BasicFormula, alpha: BasicFormula) -> BasicFormula:
    amap = alpha.eq_map()
    if not amap:
        return beta
    eqs = [EqAtom(e.lhs, amap[e.lhs]) if e.lhs in amap else e for e in beta.eqs]
    return BasicFormula(tuple(dict.fromkeys(eqs)), beta.fins)


def _trivially_true(phi: NormalFormula) -> bool:
    """A leaf child whose content is already in α makes φ equivalent to true."""
    atoms = phi.alpha.atoms()
    return any(not c.children and c.alpha.atoms() <= atoms for c in phi.children)


def shape_key(n: NormalFormula, ren: dict[Var, str] | None = None, level: int = 0) -> tuple:
    """Identity up to renaming of bound variables and conjunct order."""
    ren = dict(ren or {})
    for i, v in enumerate(n.bound):
        ren[v] = f"#{level}.{i}:{v.sort}"

    def name(v: Var) -> str:
        return ren.get(v, v.name)

    atoms = []
    for e in n.alpha.eqs:
        rhs = name(e.rhs) if isinstance(e.rhs, Var) else (e.rhs.gen, tuple(name(a) for a in e.rhs.args))  # type: ignore[union-attr]
        atoms.append((0, name(e.lhs), rhs))
    atoms += [(1, name(v), "") for v in n.alpha.fins]
    kids = sorted(shape_key(c, ren, level + 1) for c in n.children)
    return (tuple(sorted(map(repr, atoms))), tuple(kids))


def dedupe(nfs: Iterable[NormalFormula]) -> list[NormalFormula]:
    seen: set[tuple] = set()
    out = []
    for n in nfs:
        k = shape_key(n)
        if k not in seen:
            seen.add(k)
            out.append(n)
    return out


@contextmanager
def _recursion_limit(n: int):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, n))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


# -- the solver ---------------------------------------------------------------------------

def solve(
    f: Formula,
    sig: Signature,
    analysis: SortAnalysis,
    free_vars: Sequence[Var] | None = None,
    stats: Stats | None = None,
    strategy: Strategy | None = None,
    trace: list[Instantiation] | None = None,
    debug: bool = False,
) -> SolveOutcome:
    """Decide/simplify ``f``; returns True, False or a disjunction of solved forms."""
    fv = list(free_variables(f))
    if free_vars is not None:
        declared = list(free_vars)
        fv = declared + [v for v in fv if v not in declared]
    fresh = FreshNames(start=_first_free_index(fv))
    ctx = SolveContext(analysis, fresh, stats or Stats(), strategy, trace, debug)
    with _recursion_limit(20000):
        nf = normalize_negation(f, fresh)
        alpha = solve_basic([*fv, *nf.bound], nf.alpha, analysis, ctx.stats)
        if not alpha:
            return SolveOutcome("false", (), tuple(fv))
        results = solve_nested(fv, NormalFormula(nf.bound, alpha, nf.children), ctx)
    if not results:
        return SolveOutcome("false", (), tuple(fv))
    if any(r.is_neg_true() for r in results):
        return SolveOutcome("true", (), tuple(fv))
    unique = dedupe(results)
    return SolveOutcome("disjunction", tuple(SolvedDisjunct(r, tuple(fv)) for r in unique), tuple(fv))


def _first_free_index(fv: Iterable[Var]) -> int:
    top = -1
    for v in fv:
        if v.name.startswith("_v") and v.name[2:].isdigit():
            top = max(top, int(v.name[2:]))
    return top + 1


def solve_nested(
    free_vars: Sequence[Var],
    phi: NormalFormula,
    ctx: SolveContext,
    _measure: dict[int, int] | None = None,
) -> list[NormalFormula]:
    ctx.stats.step("nested")
    alpha = phi.alpha
    vx = [*free_vars, *phi.bound]
    collected: list[NormalFormula] = []
    for child in phi.children:
        beta = solve_basic([*vx, *child.bound], alpha & child.alpha, ctx.analysis, ctx.stats)
        if not beta:
            continue
        beta = _reuse_alpha_rhs(beta, alpha)
        collected += solve_nested(vx, NormalFormula(child.bound, beta, child.children), ctx)
    return solve_final(free_vars, NormalFormula(phi.bound, alpha, tuple(dedupe(collected))), ctx, _measure)


def solve_final(
    free_vars: Sequence[Var],
    phi: NormalFormula,
    ctx: SolveContext,
    _measure: dict[int, int] | None = None,
) -> list[NormalFormula]:
    ctx.stats.step("final")
    if _trivially_true(phi):  # a child repeats α
        return []
    if phi.depth > 3:
        raise DepthError(f"solve_final received depth {phi.depth}")
    v = list(free_vars)
    if phi.depth == 3:  # lift the grandchildren of one depth-2 child
        ctx.stats.step("depth_reduce")
        j = next(i for i, c in enumerate(phi.children) if c.depth == 2)
        chosen = rename_bound(phi.children[j], ctx.fresh)
        others = phi.children[:j] + phi.children[j + 1 :]
        psi = NormalFormula(phi.bound, phi.alpha, (NormalFormula(chosen.bound, chosen.alpha), *others))
        out = solve_final(v, psi, ctx)
        for g in chosen.children:
            bound = (*phi.bound, *chosen.bound, *g.bound)
            gamma = solve_basic([*v, *bound], phi.alpha & chosen.alpha & g.alpha, ctx.analysis, ctx.stats)
            if not gamma:
                continue
            out += solve_nested(v, NormalFormula(bound, gamma, others), ctx)
        return out

    inst = find_instantiation(v, phi, ctx.analysis, ctx.fresh, ctx.strategy)
    if ctx.debug and _measure is not None:
        now = instantiation_measure(v, phi, ctx.analysis)
        if not measure_less(now, _measure):
            # the measure can grow when replace_lhs moves a generator term onto a
            # smaller variable; counted rather than asserted
            ctx.measure_increases.append((_measure, now))
    if inst is not None:
        ctx.stats.instantiations[str(inst.condition)] += 1
        if ctx.trace is not None:
            ctx.trace.append(inst)
        measure = instantiation_measure(v, phi, ctx.analysis) if ctx.debug else None
        out: list[NormalFormula] = []
        for case in apply_instantiation(phi, inst):
            alpha = solve_basic([*v, *case.bound], case.alpha, ctx.analysis, ctx.stats)
            if not alpha:
                continue
            out += solve_nested(v, NormalFormula(case.bound, alpha, case.children), ctx, measure)
        return out

    ctx.stats.step("prune")
    res = remove_unreachable_parts(v, phi)
    if _trivially_true(res):
        return []
    return [res]


def remove_unreachable_parts(free_vars: Sequence[Var], phi: NormalFormula) -> NormalFormula:
    alpha = phi.alpha
    reach = reachable_from(free_vars, alpha.eqs)
    x1 = tuple(x for x in phi.bound if x in reach)
    a1 = BasicFormula(
        tuple(e for e in alpha.eqs if e.lhs in reach), tuple(u for u in alpha.fins if u in reach)
    )
    a2 = [FinAtom(u) for u in alpha.fins if u not in reach]
    lhs = alpha.lhs_vars()
    x3 = [x for x in phi.bound if x in lhs and x not in reach]
    x2 = {x for x in phi.bound if x not in reach and x not in lhs}
    kids: list[NormalFormula] = []
    for c in phi.children:
        bstar = c.alpha.without(a2)
        inner = [*x3, *c.bound]
        inner_set = set(inner)
        roots = [w for w in bstar.variables() if w not in inner_set]
        r = reachable_from(roots, bstar.eqs)
        b1 = BasicFormula(
            tuple(e for e in bstar.eqs if e.lhs in r), tuple(u for u in bstar.fins if u in r)
        )
        if any(w in x2 for w in b1.variables()):
            continue
        y1 = tuple(w for w in inner if w in r)
        kids.append(NormalFormula(y1, b1))
    return NormalFormula(x1, a1, tuple(dedupe(kids)))


# -- solvedness ------------------------------------------------------------------

def is_fully_simplified(
    f: "Formula | SolvedDisjunct | NormalFormula",
    free_vars: Sequence[Var] | None,
    analysis: SortAnalysis,
) -> tuple[bool, list[str]]:
    """Check the five solvedness conditions on ``¬f``; returns (ok, diagnostics)."""
    if isinstance(f, SolvedDisjunct):
        n = f.normal
        fv = list(free_vars) if free_vars is not None else list(f.free_vars)
    elif isinstance(f, NormalFormula):
        n = f
        fv = list(free_vars) if free_vars is not None else free_variables(f)
    else:
        if isinstance(f, Top):
            return True, []
        try:
            n = solved_shape(f)
        except ValueError as exc:
            return False, [f"shape: {exc}"]
        fv = list(free_vars) if free_vars is not None else free_variables(f)
    diags = solved_violations(fv, n, analysis)
    return not diags, diags


def solved_violations(fv: Sequence[Var], n: NormalFormula, analysis: SortAnalysis) -> list[str]:
    if n.depth > 2:
        return [f"depth {n.depth} > 2"]
    out: list[str] = []
    order = [*fv, *n.bound]
    out += [f"(1) alpha: {p}" for p in solved_basic_violations(order, n.alpha, analysis)]
    for c in n.children:
        out += [f"(1) beta: {p}" for p in solved_basic_violations([*order, *c.bound], c.alpha, analysis)]
    if out:
        return out
    for c in n.children:
        missing = [e for e in n.alpha.eqs if e not in set(c.alpha.eqs)]
        if missing:
            out.append(f"(2) equations of alpha missing from a child: {', '.join(map(str, missing))}")
    if out:
        return out
    for c in n.children:
        if c.alpha.atoms() <= n.alpha.atoms():
            out.append(f"(3) child adds nothing to alpha: {c}")
    if out:
        return out
    inst = find_instantiation(fv, n, analysis, fresh_for(n, fv))
    if inst is not None:
        return [f"(4) instantiable variable {inst.target} (condition {inst.condition})"]
    bound = set(n.bound)
    roots = [w for w in n.alpha.variables() if w not in bound]
    reach = reachable_from(roots, n.alpha.eqs)
    for x in n.bound:
        if x not in reach:
            out.append(f"(5) bound variable {x} unreachable")
    for c in n.children:
        cb = set(c.bound)
        roots = [w for w in c.alpha.variables() if w not in cb]
        reach = reachable_from(roots, c.alpha.eqs)
        for y in c.bound:
            if y not in reach:
                out.append(f"(5) bound variable {y} unreachable in child")
    return out


def solved_shape(f: Formula) -> NormalFormula:
    """Read ``∃x̄. α ∧ ⋀¬(∃ȳ. β)`` back into the normal formula it negates."""
    if isinstance(f, Bottom):
        raise ValueError("false is not a disjunct")
    bound: tuple[Var, ...] = ()
    body = f
    if isinstance(body, Exists):
        bound, body = body.vars, body.body
    parts = list(body.args) if isinstance(body, And) else [body]
    atoms: list[Formula] = []
    kids: list[NormalFormula] = []
    for p in parts:
        if isinstance(p, Not):
            inner = p.arg
            ys: tuple[Var, ...] = ()
            if isinstance(inner, Exists):
                ys, inner = inner.vars, inner.body
            inner_parts = list(inner.args) if isinstance(inner, And) else [inner]
            kids.append(NormalFormula(ys, _basic_of(inner_parts)))
        elif not isinstance(p, Top):
            atoms.append(p)
    return NormalFormula(bound, _basic_of(atoms), tuple(kids))


def _basic_of(parts: Iterable[Formula]) -> BasicFormula:
    eqs, fins = [], []
    for p in parts:
        if isinstance(p, Top):
            continue
        if isinstance(p, Eq) and isinstance(p.lhs, Var) and (
            isinstance(p.rhs, Var) or (isinstance(p.rhs, App) and all(isinstance(a, Var) for a in p.rhs.args))
        ):
            eqs.append(EqAtom(p.lhs, p.rhs))
        elif isinstance(p, Fin) and isinstance(p.arg, Var):
            fins.append(p.arg)
        else:
            raise ValueError(f"not a flat atom: {p}")
    return BasicFormula(tuple(eqs), tuple(fins))
