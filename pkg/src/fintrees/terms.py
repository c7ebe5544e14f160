"""Terms: variables, generator applications and (frontend only) selectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Union


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class App:
    gen: str
    args: tuple["Term", ...]
    sort: str

    def __str__(self) -> str:
        if not self.args:
            return self.gen
        return f"{self.gen}({', '.join(map(str, self.args))})"


@dataclass(frozen=True, slots=True)
class Sel:
    """Selector application; only the datatype frontend produces these."""

    selector: str
    arg: "Term"
    sort: str

    def __str__(self) -> str:
        return f"{self.selector}({self.arg})"


Term = Union[Var, App, Sel]


def term_vars(t: Term) -> Iterator[Var]:
    """Variables of ``t`` in left-to-right order (with repetitions)."""
    stack = [t]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Var):
            yield cur
        elif isinstance(cur, App):
            stack.extend(reversed(cur.args))
        else:
            stack.append(cur.arg)


def subst_term(t: Term, mapping: Mapping[Var, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, App):
        return App(t.gen, tuple(subst_term(a, mapping) for a in t.args), t.sort)
    return Sel(t.selector, subst_term(t.arg, mapping), t.sort)


def map_term(t: Term, fn: Callable[[Term], Term | None]) -> Term:
    """Bottom-up rewrite: ``fn`` may return a replacement or None."""
    if isinstance(t, App):
        t = App(t.gen, tuple(map_term(a, fn) for a in t.args), t.sort)
    elif isinstance(t, Sel):
        t = Sel(t.selector, map_term(t.arg, fn), t.sort)
    out = fn(t)
    return t if out is None else out


def has_selector(t: Term) -> bool:
    if isinstance(t, Sel):
        return True
    if isinstance(t, App):
        return any(has_selector(a) for a in t.args)
    return False


def term_depth(t: Term) -> int:
    if isinstance(t, App):
        return 1 + max((term_depth(a) for a in t.args), default=0)
    if isinstance(t, Sel):
        return 1 + term_depth(t.arg)
    return 0


def u_var(sort: str) -> Var:
    """The reserved variable standing for the unique infinite tree of ``sort``."""
    return Var(f"$u_{sort}", sort)


def is_reserved_name(name: str) -> bool:
    return name.startswith("$") or name.startswith("_v")
