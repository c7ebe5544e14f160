"""Solving basic formulae (equation and fin rewriting) and reachability."""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .formula import BasicFormula, EqAtom
from .signature import SortAnalysis
from .stats import Stats
from .terms import App, Var


@dataclass(frozen=True)
class Contradiction:
    rule: str

    def __bool__(self) -> bool:  # lets callers write ``if not result``
        return False


SolvedBasic = BasicFormula
BasicResult = Union[BasicFormula, Contradiction]


# -- reachability -----------------------------------------------------------------

def _edges(eqs: Iterable[EqAtom]) -> dict[Var, list[Var]]:
    out: dict[Var, list[Var]] = defaultdict(list)
    for e in eqs:
        if isinstance(e.rhs, Var):
            out[e.lhs].append(e.rhs)
        else:
            out[e.lhs].extend(e.rhs.args)  # type: ignore[arg-type]
    return out


def reachable_from(starts: Iterable[Var], eqs: Iterable[EqAtom]) -> set[Var]:
    edges = _edges(eqs)
    seen = set(starts)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in edges.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def reachable_set(start: Var, b: BasicFormula) -> set[Var]:
    return reachable_from([start], b.eqs)


def _properly_reachable(v: Var, edges: dict[Var, list[Var]]) -> bool:
    seen: set[Var] = set()
    stack = list(edges.get(v, ()))
    while stack:
        w = stack.pop()
        if w == v:
            return True
        if w not in seen:
            seen.add(w)
            stack.extend(edges.get(w, ()))
    return False


def is_properly_reachable(v: Var, b: BasicFormula) -> bool:
    return _properly_reachable(v, _edges(b.eqs))


# -- the rules ------------------------------------------------------------------------

class _State:
    def __init__(self, order: Sequence[Var], b: BasicFormula, analysis: SortAnalysis, stats: Stats | None):
        self.rank = {v: i for i, v in enumerate(order)}
        missing = [v for v in b.variables() if v not in self.rank]
        if missing:
            raise ValueError(f"variables missing from order: {', '.join(map(str, missing))}")
        self.eqs: list[EqAtom] = list(b.eqs)
        self.fins: list[Var] = list(b.fins)
        self.analysis = analysis
        self.stats = stats

    def fired(self, rule: str) -> None:
        if self.stats is not None:
            self.stats.step(rule)

    # each rule instance is (rule, i, j); apply returns Contradiction or None

    def sweep1(self) -> Contradiction | bool:
        """One deterministic pass of the equation rules; True if anything fired."""
        rank = self.rank
        changed = False
        eqs: list[EqAtom] = []
        for e in self.eqs:
            if isinstance(e.rhs, Var):
                if e.rhs == e.lhs:
                    self.fired("drop_refl")
                    changed = True
                    continue
                if rank[e.lhs] < rank[e.rhs]:
                    self.fired("orient")
                    changed = True
                    e = EqAtom(e.rhs, e.lhs)
            eqs.append(e)
        groups: dict[Var, list[int]] = defaultdict(list)
        for i, e in enumerate(eqs):
            groups[e.lhs].append(i)
        dropped: set[int] = set()
        extra: list[EqAtom] = []
        for idx in groups.values():
            if len(idx) < 2:
                continue
            changed = True
            keep = next((i for i in idx if isinstance(eqs[i].rhs, Var)), None)
            if keep is not None:
                u = eqs[keep].rhs
                for j in idx:
                    if j != keep:
                        self.fired("replace_lhs")
                        eqs[j] = EqAtom(u, eqs[j].rhs)  # type: ignore[arg-type]
                continue
            first = eqs[idx[0]].rhs
            for j in idx[1:]:
                other = eqs[j].rhs
                if other.gen != first.gen:  # type: ignore[union-attr]
                    self.fired("clash")
                    return Contradiction("clash")
                self.fired("decompose")
                dropped.add(j)
                extra.extend(EqAtom(y, z) for y, z in zip(first.args, other.args))  # type: ignore[union-attr]
        if dropped:
            eqs = [e for i, e in enumerate(eqs) if i not in dropped]
        self.eqs = eqs + extra
        return changed

    def loop1_all(self) -> list[tuple]:
        rank = self.rank
        out: list[tuple] = []
        groups: dict[Var, list[int]] = defaultdict(list)
        for i, e in enumerate(self.eqs):
            groups[e.lhs].append(i)
            if isinstance(e.rhs, Var):
                if e.rhs == e.lhs:
                    out.append(("drop_refl", i, None))
                elif rank[e.lhs] < rank[e.rhs]:
                    out.append(("orient", i, None))
        for idx in groups.values():
            for i in idx:
                for j in idx:
                    if i == j:
                        continue
                    ri, rj = self.eqs[i].rhs, self.eqs[j].rhs
                    if isinstance(ri, Var):
                        if ri != self.eqs[i].lhs and rank[ri] < rank[self.eqs[i].lhs]:
                            out.append(("replace_lhs", i, j))
                    elif isinstance(rj, App) and i < j:
                        out.append(("clash" if ri.gen != rj.gen else "decompose", i, j))
        return out

    def apply1(self, inst: tuple) -> Contradiction | None:
        rule, i, j = inst
        self.fired(rule)
        eqs = self.eqs
        if rule == "drop_refl":
            del eqs[i]
        elif rule == "orient":
            e = eqs[i]
            eqs[i] = EqAtom(e.rhs, e.lhs)  # type: ignore[arg-type]
        elif rule == "replace_lhs":
            u = eqs[i].rhs
            eqs[j] = EqAtom(u, eqs[j].rhs)  # type: ignore[arg-type]
        elif rule == "clash":
            return Contradiction("clash")
        else:
            a, b = eqs[i].rhs, eqs[j].rhs
            del eqs[j]
            eqs.extend(EqAtom(y, z) for y, z in zip(a.args, b.args))  # type: ignore[union-attr]
        return None

    def loop2_all(self, first_only: bool) -> list[tuple]:
        out: list[tuple] = []
        eqmap: dict[Var, Union[Var, App]] = {e.lhs: e.rhs for e in self.eqs}
        edges = _edges(self.eqs)
        a = self.analysis

        def add(inst: tuple) -> bool:
            out.append(inst)
            return first_only

        seen: set[Var] = set()
        for i, v in enumerate(self.fins):
            if v in seen and add(("fin_dup", i)):
                return out
            seen.add(v)
        for i, v in enumerate(self.fins):
            if isinstance(eqmap.get(v), Var) and add(("fin_follow", i)):
                return out
        cyclic: dict[Var, bool] = {}
        for i, v in enumerate(self.fins):
            if v not in cyclic:
                cyclic[v] = _properly_reachable(v, edges)
            if cyclic[v] and add(("fin_cycle", i)):
                return out
        for i, v in enumerate(self.fins):
            if isinstance(eqmap.get(v), App) and not cyclic[v] and add(("fin_args", i)):
                return out
        for i, v in enumerate(self.fins):
            if v.sort in a.s0i and add(("fin_no_infinite", i)):
                return out
        for i, v in enumerate(self.fins):
            if v.sort in a.s0f and add(("fin_no_finite", i)):
                return out
        return out

    def apply2(self, inst: tuple) -> Contradiction | None:
        rule, i = inst
        self.fired(rule)
        fins = self.fins
        v = fins[i]
        if rule in ("fin_dup", "fin_no_infinite"):
            del fins[i]
        elif rule == "fin_follow":
            fins[i] = next(e.rhs for e in self.eqs if e.lhs == v)  # type: ignore[assignment]
        elif rule in ("fin_cycle", "fin_no_finite"):
            return Contradiction(rule)
        else:  # fin_args
            rhs = next(e.rhs for e in self.eqs if e.lhs == v)
            del fins[i]
            fins.extend(rhs.args)  # type: ignore[union-attr]
        return None

    def finish(self) -> BasicFormula:
        """Point variable equations and generator arguments at class roots.

        The rules leave the choice of representative open (which of two
        variable equations survives replace_lhs, which application survives
        decompose).  Rewriting to the least variable of each class makes the
        result independent of the schedule while keeping it solved.
        """
        eqmap = {e.lhs: e.rhs for e in self.eqs}

        def root(v: Var) -> Var:
            while isinstance(eqmap.get(v), Var):
                v = eqmap[v]  # type: ignore[assignment]
            return v

        out: dict[Var, EqAtom] = {}
        for e in self.eqs:
            if isinstance(e.rhs, Var):
                out[e.lhs] = EqAtom(e.lhs, root(e.lhs))
            else:
                out[e.lhs] = EqAtom(e.lhs, App(e.rhs.gen, tuple(root(a) for a in e.rhs.args), e.rhs.sort))  # type: ignore[arg-type]
        rank = self.rank
        eqs = tuple(out[v] for v in sorted(out, key=rank.__getitem__))
        fins = tuple(sorted(set(self.fins), key=rank.__getitem__))
        return BasicFormula(eqs, fins)


def solve_basic(
    order: Sequence[Var],
    b: BasicFormula,
    analysis: SortAnalysis,
    stats: Stats | None = None,
    rng: random.Random | None = None,
) -> BasicResult:
    """Solve ``b`` w.r.t. the variable order; Contradiction if unsatisfiable.

    With ``rng`` the applicable rule instance is chosen at random in each
    step (used to test that the result does not depend on scheduling).
    """
    st = _State(order, b, analysis, stats)
    if stats is not None:
        stats.step("basic")
    if rng is None:
        while True:
            res = st.sweep1()
            if isinstance(res, Contradiction):
                return res
            if not res:
                break
    else:
        while True:
            cands = st.loop1_all()
            if not cands:
                break
            res = st.apply1(rng.choice(cands))
            if res is not None:
                return res
    while True:
        cands = st.loop2_all(first_only=rng is None)
        if not cands:
            break
        res = st.apply2(cands[0] if rng is None else rng.choice(cands))
        if res is not None:
            return res
    return st.finish()


def is_solved_basic(order: Sequence[Var], b: BasicFormula, analysis: SortAnalysis) -> bool:
    return not solved_basic_violations(order, b, analysis)


def solved_basic_violations(order: Sequence[Var], b: BasicFormula, analysis: SortAnalysis) -> list[str]:
    rank = {v: i for i, v in enumerate(order)}
    problems: list[str] = []
    lhs_seen: set[Var] = set()
    for e in b.eqs:
        if isinstance(e.rhs, App) and not all(isinstance(a, Var) for a in e.rhs.args):
            problems.append(f"not flat: {e}")
        if e.lhs in lhs_seen:
            problems.append(f"duplicate lhs {e.lhs}")
        lhs_seen.add(e.lhs)
        if isinstance(e.rhs, Var):
            if e.lhs not in rank or e.rhs not in rank:
                problems.append(f"variable outside order in {e}")
            elif rank[e.lhs] <= rank[e.rhs]:
                problems.append(f"misoriented {e}")
    fin_seen: set[Var] = set()
    for v in b.fins:
        if v in fin_seen or v in lhs_seen:
            problems.append(f"fin({v}) not distinct")
        fin_seen.add(v)
        if not analysis.has_finite_and_infinite(v.sort):
            problems.append(f"fin({v}) on sort {v.sort}")
    return problems
