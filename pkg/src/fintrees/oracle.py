"""Independent semantics used to check the solver.

Three evaluators live here:

* ``eval_formula`` / ``eval_closed_finite`` expand quantifiers over explicit
  finite domains and compare trees by bisimulation;
* ``basic_satisfiable`` decides ``∃ȳ. β`` for a basic formula under a partial
  valuation by rational-tree unification (no occurs check), which is enough to
  evaluate solved disjuncts even when bound variables range over infinite sorts;
* ``extract_model`` searches small candidate pools for a valuation of a fully
  simplified formula and verifies it with ``holds_solved``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import InfiniteDomain, NotSimplified
from .formula import (
    TRUE,
    And,
    BasicFormula,
    Bottom,
    Eq,
    Exists,
    Fin,
    Forall,
    Formula,
    Iff,
    Implies,
    NormalFormula,
    Not,
    Or,
    Top,
    free_variables,
)
from .signature import Signature, SortAnalysis, enumerate_domain, inhabitant_tree, make_signature
from .terms import App, Sel, Term, Var
from .trees import RationalTree, is_finite_tree, rational_tree_equal

Valuation = dict[Var, RationalTree]


# -- direct evaluation over finite domains ---------------------------------------

def eval_term(t: Term, valuation: Mapping[Var, RationalTree], sel=None) -> RationalTree:
    """Evaluate a term; ``sel(name, tree)`` interprets selector applications."""
    if isinstance(t, Sel):
        if sel is None:
            raise ValueError(f"no selector interpretation for {t.selector}")
        return sel(t.selector, eval_term(t.arg, valuation, sel))
    if isinstance(t, App) and sel is not None:
        return RationalTree.apply(t.gen, [eval_term(a, valuation, sel) for a in t.args])
    return RationalTree.from_term(t, valuation)


def eval_formula(
    f: Formula,
    valuation: Mapping[Var, RationalTree],
    domain_of,
    sel=None,
) -> bool:
    """Evaluate ``f``; ``domain_of(sort)`` supplies the values for quantifiers."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Eq):
        return rational_tree_equal(eval_term(f.lhs, valuation, sel), eval_term(f.rhs, valuation, sel))
    if isinstance(f, Fin):
        return is_finite_tree(eval_term(f.arg, valuation, sel))
    if isinstance(f, Not):
        return not eval_formula(f.arg, valuation, domain_of, sel)
    if isinstance(f, And):
        return all(eval_formula(a, valuation, domain_of, sel) for a in f.args)
    if isinstance(f, Or):
        return any(eval_formula(a, valuation, domain_of, sel) for a in f.args)
    if isinstance(f, Implies):
        return not eval_formula(f.lhs, valuation, domain_of, sel) or eval_formula(f.rhs, valuation, domain_of, sel)
    if isinstance(f, Iff):
        return eval_formula(f.lhs, valuation, domain_of, sel) == eval_formula(f.rhs, valuation, domain_of, sel)
    if isinstance(f, (Exists, Forall)):
        want = isinstance(f, Exists)
        env = dict(valuation)
        domains = [domain_of(v.sort) for v in f.vars]
        for values in itertools.product(*domains):
            env.update(zip(f.vars, values))
            if eval_formula(f.body, env, domain_of, sel) == want:
                return want
        return not want
    raise TypeError(f"cannot evaluate {f!r}")


def domain_function(sig: Signature, analysis: SortAnalysis, overrides: Mapping[str, Sequence[RationalTree]] | None = None):
    cache: dict[str, list[RationalTree]] = {k: list(v) for k, v in (overrides or {}).items()}

    def domain_of(sort: str) -> list[RationalTree]:
        if sort not in cache:
            cache[sort] = enumerate_domain(sig, analysis, sort)
        return cache[sort]

    return domain_of


def eval_closed_finite(
    f: Formula,
    sig: Signature,
    analysis: SortAnalysis,
    valuation: Mapping[Var, RationalTree] | None = None,
    domains: Mapping[str, Sequence[RationalTree]] | None = None,
) -> bool:
    """Evaluate ``f`` by expanding every quantifier over its sort's domain.

    Raises InfiniteDomain for quantified sorts outside S_FF ∩ S_FI unless
    ``domains`` supplies an explicit (possibly truncated) candidate list.
    """
    valuation = dict(valuation or {})
    missing = [v for v in free_variables(f) if v not in valuation]
    if missing:
        raise ValueError(f"no value for free variable(s) {', '.join(v.name for v in missing)}")
    return eval_formula(f, valuation, domain_function(sig, analysis, domains))


def all_valuations(variables: Sequence[Var], domain_of) -> Iterable[Valuation]:
    for values in itertools.product(*(domain_of(v.sort) for v in variables)):
        yield dict(zip(variables, values))


# -- unification-based evaluation of basic formulae ------------------------------

class _Unifier:
    """Union-find over term-graph nodes; classes carry at most one structure."""

    def __init__(self) -> None:
        self.parent: list[int] = []
        self.struct: list[tuple[str, tuple[int, ...]] | None] = []
        self.sort: list[str | None] = []
        self.var_node: dict[Var, int] = {}

    def new(self, struct=None, sort=None) -> int:
        self.parent.append(len(self.parent))
        self.struct.append(struct)
        self.sort.append(sort)
        return len(self.parent) - 1

    def find(self, n: int) -> int:
        while self.parent[n] != n:
            self.parent[n] = self.parent[self.parent[n]]
            n = self.parent[n]
        return n

    def node_for(self, v: Var) -> int:
        n = self.var_node.get(v)
        if n is None:
            n = self.var_node[v] = self.new(None, v.sort)
        return n

    def embed(self, tree: RationalTree) -> int:
        base = len(self.parent)
        for g, ks in tree.nodes:
            self.new((g, tuple(k + base for k in ks)))
        return tree.root + base

    def union(self, a: int, b: int) -> bool:
        todo = [(a, b)]
        while todo:
            x, y = todo.pop()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            sx, sy = self.struct[x], self.struct[y]
            self.parent[y] = x
            if self.sort[x] is None:
                self.sort[x] = self.sort[y]
            if sx is None:
                self.struct[x] = sy
            elif sy is not None:
                if sx[0] != sy[0] or len(sx[1]) != len(sy[1]):
                    return False
                todo.extend(zip(sx[1], sy[1]))
        return True

    def finite_possible(self, n: int, s0f: frozenset[str]) -> bool:
        """Can the class of ``n`` denote a finite tree (free classes chosen freely)?"""
        state: dict[int, int] = {}  # 1 = on stack, 2 = done
        stack = [(self.find(n), False)]
        while stack:
            c, leaving = stack.pop()
            if leaving:
                state[c] = 2
                continue
            st = state.get(c)
            if st == 1:
                return False
            if st == 2:
                continue
            s = self.struct[c]
            if s is None:
                if self.sort[c] in s0f:
                    return False
                state[c] = 2
                continue
            state[c] = 1
            stack.append((c, True))
            for k in s[1]:
                kc = self.find(k)
                if state.get(kc) == 1:
                    return False
                if state.get(kc) is None:
                    stack.append((kc, False))
        return True

    def value(self, n: int) -> RationalTree | None:
        """The unique tree of a fully determined class, else None."""
        ids: dict[int, int] = {}
        order: list[int] = []
        stack = [self.find(n)]
        while stack:
            c = stack.pop()
            if c in ids:
                continue
            if self.struct[c] is None:
                return None
            ids[c] = len(order)
            order.append(c)
            for k in self.struct[c][1]:  # type: ignore[index]
                kc = self.find(k)
                if kc not in ids:
                    stack.append(kc)
        nodes = tuple((self.struct[c][0], tuple(ids[self.find(k)] for k in self.struct[c][1])) for c in order)  # type: ignore[index]
        return RationalTree(nodes, 0)


def _load(u: _Unifier, b: BasicFormula, valuation: Mapping[Var, RationalTree]) -> bool:
    for v in b.variables():
        if v in valuation and v not in u.var_node:
            n = u.node_for(v)
            if not u.union(n, u.embed(valuation[v])):
                return False
    for e in b.eqs:
        ln = u.node_for(e.lhs)
        if isinstance(e.rhs, Var):
            rn = u.node_for(e.rhs)
        else:
            kids = tuple(u.node_for(a) for a in e.rhs.args)  # type: ignore[union-attr]
            rn = u.new((e.rhs.gen, kids), e.rhs.sort)
        if not u.union(ln, rn):
            return False
    return True


def basic_satisfiable(
    b: BasicFormula, valuation: Mapping[Var, RationalTree], analysis: SortAnalysis
) -> bool:
    """Decide ``∃(vars of b not in valuation). b`` in the tree structure."""
    u = _Unifier()
    if not _load(u, b, valuation):
        return False
    return all(u.finite_possible(u.node_for(v), analysis.s0f) for v in b.fins)


def holds_solved(n: NormalFormula, valuation: Mapping[Var, RationalTree], analysis: SortAnalysis) -> bool:
    """Truth of ``∃x̄. α ∧ ⋀¬(∃ȳ. β)`` (the negation of ``n``) under ``valuation``.

    Relies on the bound variables of α being determined by the valuation,
    which condition (5) of solvedness guarantees.
    """
    if n.depth > 2:
        raise ValueError("holds_solved expects depth <= 2")
    u = _Unifier()
    if not _load(u, n.alpha, valuation):
        return False
    if not all(u.finite_possible(u.node_for(v), analysis.s0f) for v in n.alpha.fins):
        return False
    env = dict(valuation)
    for x in n.bound:
        if x in u.var_node:
            val = u.value(u.node_for(x))
            if val is None:
                raise ValueError(f"bound variable {x} not determined by the valuation")
            env[x] = val
    for c in n.children:
        if basic_satisfiable(c.alpha, env, analysis):
            return False
    return True


# -- candidate pools --------------------------------------------------------------

def _shapes(sig: Signature, sort: str, depth: int, anc: tuple[str, ...], cap: int) -> list:
    """Small term shapes; ``("ref", k)`` points back to ancestor ``k``."""
    out: list = [("ref", k) for k, s in enumerate(anc) if s == sort]
    for g in sig.gens_of(sort):
        if not g.arg_sorts:
            out.append((g.name, ()))
        elif depth > 0:
            sub = [_shapes(sig, a, depth - 1, anc + (sort,), cap) for a in g.arg_sorts]
            for combo in itertools.islice(itertools.product(*sub), cap):
                out.append((g.name, combo))
        if len(out) >= cap:
            break
    return out[:cap]


def _shape_tree(shape) -> RationalTree | None:
    nodes: list = []

    def go(s, path: list[int]) -> int | None:
        if s[0] == "ref":
            return path[s[1]]
        idx = len(nodes)
        nodes.append(None)
        kids = []
        for c in s[1]:
            k = go(c, path + [idx])
            if k is None:
                return None
            kids.append(k)
        nodes[idx] = (s[0], tuple(kids))
        return idx

    if go(shape, []) is None:
        return None
    return RationalTree(tuple(nodes), 0)


def candidate_pool(sig: Signature, analysis: SortAnalysis, sort: str, depth: int = 3, cap: int = 40) -> list[RationalTree]:
    """Finite trees first (breadth-first), then small rational ones."""
    if analysis.finite_domain(sort):
        return enumerate_domain(sig, analysis, sort)
    trees: list[RationalTree] = [RationalTree.from_term(t) for t in analysis.fin_inhabitants.get(sort, ())]
    trees += [inhabitant_tree(analysis, t) for t in analysis.infin_inhabitants.get(sort, ())]
    for d in range(depth + 1):
        for s in _shapes(sig, sort, d, (), cap):
            t = _shape_tree(s)
            if t is not None:
                trees.append(t)
    uniq = list(dict.fromkeys(trees))
    uniq.sort(key=lambda t: (not t.is_finite(), t.size()))
    return uniq[: cap * 2]


# -- model extraction -------------------------------------------------------------

def _as_normal(f, free_vars):
    from .solver import SolvedDisjunct, solved_shape

    if isinstance(f, SolvedDisjunct):
        n, fv = f.normal, list(free_vars or f.free_vars)
    elif isinstance(f, NormalFormula):
        n, fv = f, list(free_vars or free_variables(f))
    else:
        if isinstance(f, Top):
            return None, []
        try:
            n = solved_shape(f)
        except ValueError as exc:
            raise NotSimplified(str(exc)) from None
        fv = list(free_vars or free_variables(f))
    return n, fv


def extract_model(
    f,
    sig: Signature,
    analysis: SortAnalysis,
    free_vars: Sequence[Var] | None = None,
    max_checks: int = 50000,
    check: bool = True,
) -> Valuation:
    """A valuation of the free variables satisfying a fully simplified formula.

    Non-lhs variables of α are the parameters; they are drawn from candidate
    pools (diagonally, smallest first) and the lhs variables follow from α by
    the Unique Solution Axiom.  Every candidate is verified with
    ``holds_solved`` before it is returned.
    """
    from .solver import is_fully_simplified

    if isinstance(f, BasicFormula):
        return solve_alpha(f, {})
    n, fv = _as_normal(f, free_vars)
    if n is None:
        return {}
    if check:
        ok, diags = is_fully_simplified(n, fv, analysis)
        if not ok:
            raise NotSimplified("; ".join(diags))
    lhs = n.alpha.lhs_vars()
    params = list(dict.fromkeys([v for v in (*fv, *n.alpha.variables()) if v not in lhs]))
    pools = [candidate_pool(sig, analysis, p.sort) for p in params]
    if any(not p for p in pools):
        raise NotSimplified("empty candidate pool")
    checks = 0
    for combo in _diagonal(pools):
        env = dict(zip(params, combo))
        vals = solve_alpha(n.alpha, env, [v for v in fv if v in lhs])
        val = {v: vals[v] for v in fv}
        if holds_solved(n, val, analysis):
            return val
        checks += 1
        if checks >= max_checks:
            break
    raise NotSimplified("no model found among the candidate pools")


def _diagonal(pools: Sequence[Sequence[RationalTree]]):
    """All index tuples ordered by their maximum index."""
    if not pools:
        yield ()
        return
    longest = max(len(p) for p in pools)
    for bound in range(longest):
        ranges = [range(min(bound + 1, len(p))) for p in pools]
        for idx in itertools.product(*ranges):
            if max(idx) == bound:
                yield tuple(p[i] for p, i in zip(pools, idx))


def solve_alpha(b: BasicFormula, env: Mapping[Var, RationalTree], roots: Iterable[Var] | None = None) -> Valuation:
    """Read the lhs variables of a solved basic formula as a node table."""
    eqs = {e.lhs: e.rhs for e in b.eqs}
    roots = list(roots) if roots is not None else list(eqs)
    out = dict(env)
    out.update(RationalTree.from_system(eqs, roots, env))
    return out


# -- random formulae ----------------------------------------------------------------

@dataclass(frozen=True)
class Profile:
    max_quant_depth: int = 2
    max_atoms: int = 6
    free_vars: int = 0
    term_depth: int = 1
    max_bound: int = 2
    fin_weight: float = 0.2
    closed_only: bool = False


def random_formula(seed: int, sig: Signature, profile: Profile | None = None, free: Sequence[Var] | None = None) -> Formula:
    """A well-sorted random formula, deterministic in ``seed``.

    Free variables are ``a0, a1, ...`` (or ``free`` if given); every atom
    mentions only variables in scope.
    """
    p = profile or Profile()
    rng = random.Random(seed)
    sorts = sorted(sig.sorts)
    if free is None:
        free = [Var(f"a{i}", rng.choice(sorts)) for i in range(p.free_vars)]
    counter = itertools.count()
    atoms_left = [p.max_atoms]

    def heights(scope: list[Var]) -> dict[str, int]:
        # least height of a term of each sort buildable from the scope; absent sorts have none
        h = {v.sort: 0 for v in scope}
        changed = True
        while changed:
            changed = False
            for g in sig.generators:
                if all(a in h for a in g.arg_sorts):
                    k = 1 + max((h[a] for a in g.arg_sorts), default=0)
                    if k < h.get(g.result_sort, k + 1):
                        h[g.result_sort] = k
                        changed = True
        return h

    def term(sort: str, scope: list[Var], depth: int, h: dict[str, int]) -> Term:
        vs = [v for v in scope if v.sort == sort]
        if vs and (depth <= 0 or rng.random() < 0.6):
            return rng.choice(vs)
        gens = [g for g in sig.gens_of(sort) if all(a in h for a in g.arg_sorts)]
        if depth <= 0:
            # shrink towards the least height so the recursion terminates
            gens = [g for g in gens if all(h[a] < h[sort] for a in g.arg_sorts)]
        g = rng.choice(gens)
        return App(g.name, tuple(term(a, scope, depth - 1, h) for a in g.arg_sorts), sort)

    def atom(scope: list[Var]) -> Formula:
        atoms_left[0] -= 1
        h = heights(scope)
        if scope and rng.random() < p.fin_weight:
            v = rng.choice(scope)
            return Fin(term(v.sort, scope, p.term_depth, h))
        buildable = [s for s in sorts if s in h]
        if scope:
            s = rng.choice(scope).sort
        elif buildable:
            s = rng.choice(buildable)
        else:
            return TRUE
        return Eq(term(s, scope, p.term_depth, h), term(s, scope, p.term_depth, h))

    def go(scope: list[Var], qdepth: int, size: int) -> Formula:
        if size <= 1 or atoms_left[0] <= 1:
            return atom(scope)
        r = rng.random()
        if qdepth < p.max_quant_depth and r < 0.35:
            k = rng.randint(1, p.max_bound)
            vs = tuple(Var(f"q{next(counter)}", rng.choice(sorts)) for _ in range(k))
            body = go(scope + list(vs), qdepth + 1, size - 1)
            return (Exists if rng.random() < 0.5 else Forall)(vs, body)
        if r < 0.5:
            return Not(go(scope, qdepth, size - 1))
        left = rng.randint(1, size - 1)
        a, b = go(scope, qdepth, left), go(scope, qdepth, size - left)
        op = rng.choice([And, And, Or, Or, Implies, Iff])
        return op((a, b)) if op in (And, Or) else op(a, b)

    return go(list(free), 0, p.max_atoms)


def random_finite_signature(seed: int) -> Signature:
    """One or two sorts, every sort with finitely many (all finite) trees."""
    rng = random.Random(seed)
    k = rng.randint(2, 3)
    gens: list[tuple] = [(f"c{i}", (), "s0") for i in range(k)]
    sorts = ["s0"]
    if rng.random() < 0.6:
        sorts.append("s1")
        gens.append(("e", (), "s1"))
        for j in range(rng.randint(1, 2)):
            arity = rng.randint(1, 2)
            gens.append((f"h{j}", tuple(["s0"] * arity), "s1"))
    return make_signature(sorts, gens)


def random_datatype_formula(seed: int, dsig, n_vars: int = 2, max_atoms: int = 4, sel_depth: int = 2) -> Formula:
    """A random quantifier-free formula over a datatype signature, with selectors.

    ``dsig`` is a :class:`~fintrees.datatypes.DatatypeSignature`; variables are
    ``x0, x1, ...`` of random sorts.
    """
    rng = random.Random(seed)
    sig = dsig.signature
    sorts = sorted(sig.sorts)
    xs = [Var(f"x{i}", rng.choice(sorts)) for i in range(n_vars)]
    sels_into: dict[str, list] = {}
    for info in dsig.selectors.values():
        sels_into.setdefault(info.result, []).append(info)

    def term(sort: str, depth: int) -> Term:
        r = rng.random()
        vs = [v for v in xs if v.sort == sort]
        if depth > 0 and sort in sels_into and r < 0.45:
            info = rng.choice(sels_into[sort])
            return Sel(info.name, term(info.domain, depth - 1), sort)
        if vs and (depth == 0 or r < 0.8):
            return rng.choice(vs)
        nullary = [g for g in sig.gens_of(sort) if not g.arg_sorts]
        gens = sig.gens_of(sort) if depth > 0 else (nullary or sig.gens_of(sort))
        g = rng.choice(gens)
        return App(g.name, tuple(term(a, max(depth - 1, 0)) for a in g.arg_sorts), sort)

    def atom() -> Formula:
        s = rng.choice([v.sort for v in xs])
        return Eq(term(s, sel_depth), term(s, sel_depth))

    def go(size: int) -> Formula:
        if size <= 1:
            return atom()
        if rng.random() < 0.3:
            return Not(go(size - 1))
        left = rng.randint(1, size - 1)
        return rng.choice([And, Or])((go(left), go(size - left)))

    return go(rng.randint(1, max_atoms))
