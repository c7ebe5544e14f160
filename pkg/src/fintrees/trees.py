"""Rational trees as finite term graphs.

A tree is a node table plus a root.  Two tables denote the same tree iff
their roots are bisimilar; ``canonical_key`` computes a minimal numbering so
that trees can be hashed and compared cheaply.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .terms import App, Term, Var

Node = tuple[str, tuple[int, ...]]


@dataclass(frozen=True, eq=False)
class RationalTree:
    nodes: tuple[Node, ...]
    root: int
    _key: tuple | None = field(default=None, repr=False, compare=False)

    # -- construction ------------------------------------------------------

    @staticmethod
    def leaf(gen: str) -> "RationalTree":
        return RationalTree(((gen, ()),), 0)

    @staticmethod
    def apply(gen: str, children: Iterable["RationalTree"]) -> "RationalTree":
        nodes: list[Node] = [(gen, ())]
        roots = []
        for child in children:
            off = len(nodes)
            nodes.extend((g, tuple(k + off for k in ks)) for g, ks in child.nodes)
            roots.append(child.root + off)
        nodes[0] = (gen, tuple(roots))
        return RationalTree(tuple(nodes), 0)

    @staticmethod
    def from_term(t: Term, env: Mapping[Var, "RationalTree"] | None = None) -> "RationalTree":
        """Build a tree from a term; variables are looked up in ``env``."""
        if isinstance(t, Var):
            if env is None or t not in env:
                raise KeyError(f"unbound variable {t.name} in ground term")
            return env[t]
        if isinstance(t, App):
            return RationalTree.apply(t.gen, [RationalTree.from_term(a, env) for a in t.args])
        raise TypeError(f"cannot build a tree from {t!r}")

    @staticmethod
    def from_system(
        eqs: Mapping[Var, Term],
        roots: Iterable[Var],
        env: Mapping[Var, "RationalTree"] | None = None,
    ) -> dict[Var, "RationalTree"]:
        """Read a solved system ``x = t`` as a node table (Unique Solution Axiom).

        Every variable reachable from ``roots`` must be either a lhs of ``eqs``
        or bound in ``env``.  Right-hand sides may be arbitrary (non-flat) terms;
        chains of variable equations must be acyclic.
        """
        env = dict(env or {})
        nodes: list[Node | None] = []
        node_of: dict[Var, int] = {}
        embedded: dict[int, int] = {}  # id(tree) -> offset

        def embed(tree: RationalTree) -> int:
            off = embedded.get(id(tree))
            if off is None:
                off = len(nodes)
                nodes.extend((g, tuple(k + off for k in ks)) for g, ks in tree.nodes)
                embedded[id(tree)] = off
            return off + tree.root

        def var_node(v: Var, visiting: frozenset = frozenset()) -> int:
            if v in node_of:
                return node_of[v]
            if v in eqs:
                rhs = eqs[v]
                if isinstance(rhs, Var):
                    if v in visiting:
                        raise ValueError(f"cyclic variable chain through {v.name}")
                    n = var_node(rhs, visiting | {v})
                    node_of[v] = n
                    return n
                idx = len(nodes)
                nodes.append(None)
                node_of[v] = idx
                nodes[idx] = term_node(rhs)
                return idx
            if v in env:
                n = embed(env[v])
                node_of[v] = n
                return n
            raise KeyError(f"variable {v.name} is neither defined nor valued")

        def term_node(t: Term) -> Node:
            assert isinstance(t, App)
            kids = []
            for a in t.args:
                if isinstance(a, Var):
                    kids.append(var_node(a))
                else:
                    idx = len(nodes)
                    nodes.append(None)
                    nodes[idx] = term_node(a)
                    kids.append(idx)
            return (t.gen, tuple(kids))

        out: dict[Var, RationalTree] = {}
        root_ids = {v: var_node(v) for v in roots}
        table = tuple(n for n in nodes)  # type: ignore[misc]
        assert all(n is not None for n in table)
        for v, r in root_ids.items():
            out[v] = RationalTree(table, r).trimmed()  # type: ignore[arg-type]
        return out

    # -- structure ---------------------------------------------------------

    @property
    def gen(self) -> str:
        return self.nodes[self.root][0]

    def children(self) -> list["RationalTree"]:
        return [RationalTree(self.nodes, k) for k in self.nodes[self.root][1]]

    def reachable(self) -> list[int]:
        seen = {self.root}
        order = [self.root]
        i = 0
        while i < len(order):
            for k in self.nodes[order[i]][1]:
                if k not in seen:
                    seen.add(k)
                    order.append(k)
            i += 1
        return order

    def trimmed(self) -> "RationalTree":
        """Drop unreachable nodes (keeps the tree value)."""
        order = self.reachable()
        if len(order) == len(self.nodes):
            return self
        ren = {old: new for new, old in enumerate(order)}
        table = tuple((self.nodes[o][0], tuple(ren[k] for k in self.nodes[o][1])) for o in order)
        return RationalTree(table, 0)

    def is_finite(self) -> bool:
        return is_finite_tree(self)

    def to_term(self, sort_of_gen: Mapping[str, str]) -> Term:
        if not self.is_finite():
            raise ValueError("infinite tree has no finite term")

        def go(n: int) -> Term:
            g, ks = self.nodes[n]
            return App(g, tuple(go(k) for k in ks), sort_of_gen[g])

        return go(self.root)

    # -- identity ----------------------------------------------------------

    def canonical_key(self) -> tuple:
        if self._key is None:
            object.__setattr__(self, "_key", _minimize(self))
        return self._key  # type: ignore[return-value]

    def canonical(self) -> "RationalTree":
        return RationalTree(self.canonical_key(), 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalTree):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    def __hash__(self) -> int:
        return hash(self.canonical_key())

    def size(self) -> int:
        return len(self.canonical_key())

    # -- printing ----------------------------------------------------------

    def __str__(self) -> str:
        return self._render(sexpr=False)

    def to_sexpr(self) -> str:
        return self._render(sexpr=True)

    def _render(self, sexpr: bool) -> str:
        table = self.canonical_key()
        back = _back_edge_targets(table)
        names = {n: f"w{i}" for i, n in enumerate(sorted(back))}

        def go(n: int, path: frozenset) -> str:
            if n in path:
                return names[n]
            g, ks = table[n]
            inner_path = path | {n}
            if ks:
                args = [go(k, inner_path) for k in ks]
                body = f"({g} {' '.join(args)})" if sexpr else f"{g}({', '.join(args)})"
            else:
                body = g
            if n in back:
                return f"(mu {names[n]} {body})" if sexpr else f"μ{names[n]}. {body}"
            return body

        return go(0, frozenset())

    def __repr__(self) -> str:
        return f"RationalTree({self})"


def _back_edge_targets(table: tuple[Node, ...]) -> set[int]:
    targets: set[int] = set()

    def go(n: int, path: frozenset) -> None:
        for k in table[n][1]:
            if k in path:
                targets.add(k)
            else:
                go(k, path | {k})

    go(0, frozenset({0}))
    return targets


def _minimize(tree: RationalTree) -> tuple[Node, ...]:
    """Partition refinement followed by breadth-first renumbering."""
    order = tree.reachable()
    nodes = tree.nodes
    block = {n: nodes[n][0] for n in order}
    while True:
        sig = {n: (block[n], tuple(block[k] for k in nodes[n][1])) for n in order}
        ids: dict = {}
        new_block = {n: ids.setdefault(sig[n], len(ids)) for n in order}
        if len(ids) == len(set(block.values())):
            block = new_block
            break
        block = new_block
    # BFS numbering over blocks from the root
    num: dict[int, int] = {}
    rep: dict[int, int] = {}
    for n in order:
        rep.setdefault(block[n], n)
    queue = [block[tree.root]]
    num[block[tree.root]] = 0
    i = 0
    while i < len(queue):
        b = queue[i]
        for k in nodes[rep[b]][1]:
            kb = block[k]
            if kb not in num:
                num[kb] = len(queue)
                queue.append(kb)
        i += 1
    return tuple(
        (nodes[rep[b]][0], tuple(num[block[k]] for k in nodes[rep[b]][1])) for b in queue
    )


def rational_tree_equal(a: RationalTree, b: RationalTree) -> bool:
    """Bisimulation check by coinductive closure over node pairs."""
    assumed: set[tuple[int, int]] = set()
    stack = [(a.root, b.root)]
    while stack:
        x, y = stack.pop()
        if (x, y) in assumed:
            continue
        assumed.add((x, y))
        gx, kx = a.nodes[x]
        gy, ky = b.nodes[y]
        if gx != gy or len(kx) != len(ky):
            return False
        stack.extend(zip(kx, ky))
    return True


def is_finite_tree(a: RationalTree) -> bool:
    """True iff no cycle is reachable from the root."""
    state: dict[int, int] = {}  # 1 = on stack, 2 = done
    stack: list[tuple[int, int]] = [(a.root, 0)]
    state[a.root] = 1
    while stack:
        n, i = stack[-1]
        kids = a.nodes[n][1]
        if i < len(kids):
            stack[-1] = (n, i + 1)
            k = kids[i]
            s = state.get(k, 0)
            if s == 1:
                return False
            if s == 0:
                state[k] = 1
                stack.append((k, 0))
        else:
            state[n] = 2
            stack.pop()
    return True
