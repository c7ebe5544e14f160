"""The s-expression problem format.

::

    (declare-sort nat)
    (declare-gen zero () nat)
    (declare-gen succ (nat) nat)
    (declare-datatype list ((nil) (cons (head nat) (tail list))))
    (declare-const x nat)
    (define-default cons 1 zero)
    (assert (exists ((y nat)) (= x (succ y))))
    (simplify)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .datatypes import CODATATYPE, DATATYPE, Constructor, DatatypeDecl, DatatypeSignature, check_declarations
from .errors import ArityError, ParseError, SortError
from .formula import (
    FALSE,
    TRUE,
    And,
    Eq,
    Exists,
    Fin,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    check_formula,
)
from .signature import Signature, make_signature, validate_signature
from .terms import App, Sel, Term, Var
from .trees import RationalTree


# -- s-expressions ---------------------------------------------------------------

@dataclass(frozen=True)
class Sym:
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple["SExpr", ...]
    line: int
    col: int


SExpr = Union[Sym, SList]


def read_sexprs(text: str) -> list[SExpr]:
    """Tokenize and read every top-level s-expression, tracking positions."""
    stack: list[tuple[list, int, int]] = []
    out: list[SExpr] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def emit(x: SExpr) -> None:
        (stack[-1][0] if stack else out).append(x)

    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            stack.append(([], line, col))
            i, col = i + 1, col + 1
            continue
        if ch == ")":
            if not stack:
                raise ParseError(line, col, "an expression (unmatched ')')")
            items, l0, c0 = stack.pop()
            emit(SList(tuple(items), l0, c0))
            i, col = i + 1, col + 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in "();":
            j += 1
        emit(Sym(text[i:j], line, col))
        col += j - i
        i = j
    if stack:
        _, l0, c0 = stack[-1]
        raise ParseError(line, col, f"')' closing the list opened at {l0}:{c0}")
    return out


# -- problems -----------------------------------------------------------------------

@dataclass
class Problem:
    sorts: list[str] = field(default_factory=list)
    generators: list[tuple[str, tuple[str, ...], str]] = field(default_factory=list)
    datatypes: list[DatatypeDecl] = field(default_factory=list)
    consts: list[Var] = field(default_factory=list)
    defaults: dict[tuple[str, int], Term] = field(default_factory=dict)
    assertions: list[Formula] = field(default_factory=list)
    command: str | None = None
    dsig: DatatypeSignature | None = None
    _sig: Signature | None = None

    @property
    def has_datatypes(self) -> bool:
        return bool(self.datatypes)

    @property
    def signature(self) -> Signature:
        if self._sig is None:
            if self.dsig is not None:
                self._sig = self.dsig.signature
            else:
                self._sig = make_signature(self.sorts, self.generators)
        return self._sig

    @property
    def selectors(self) -> dict:
        return dict(self.dsig.selectors) if self.dsig else {}

    def formula(self) -> Formula:
        if not self.assertions:
            return TRUE
        if len(self.assertions) == 1:
            return self.assertions[0]
        return And(tuple(self.assertions))

    def default_trees(self) -> dict[tuple[str, int], RationalTree]:
        return {k: RationalTree.from_term(t) for k, t in self.defaults.items()}



def _expect_sym(x: SExpr, what: str) -> str:
    if not isinstance(x, Sym):
        raise ParseError(x.line, x.col, what)
    return x.name


def _expect_list(x: SExpr, what: str) -> SList:
    if not isinstance(x, SList):
        raise ParseError(x.line, x.col, what)
    return x


class _Parser:
    def __init__(self) -> None:
        self.p = Problem()
        self.frozen = False

    def _ident(self, x: SExpr, what: str) -> str:
        name = _expect_sym(x, what)
        if name.startswith("$"):
            raise ParseError(x.line, x.col, f"{what} (names starting with '$' are reserved)")
        return name

    def freeze(self, at: SExpr) -> None:
        if self.frozen:
            return
        p = self.p
        if p.datatypes and (p.sorts or p.generators):
            raise ParseError(at.line, at.col, "either declare-sort/declare-gen or (co)datatypes, not both")
        if p.datatypes:
            p.dsig = check_declarations(p.datatypes)
        else:
            validate_signature(p.signature, require_two=False)
        self.frozen = True

    def command(self, x: SExpr) -> None:
        lst = _expect_list(x, "a command list")
        if not lst.items:
            raise ParseError(lst.line, lst.col, "a command name")
        head = _expect_sym(lst.items[0], "a command name")
        args = lst.items[1:]
        p = self.p
        if p.command is not None:
            raise ParseError(lst.line, lst.col, "end of input after the command")
        if head in ("declare-sort", "declare-gen", "declare-datatype", "declare-codatatype") and self.frozen:
            raise ParseError(lst.line, lst.col, "declarations before the first const/assert")
        if head == "declare-sort":
            self._arity(lst, 1)
            p.sorts.append(self._ident(args[0], "a sort name"))
        elif head == "declare-gen":
            self._arity(lst, 3)
            name = self._ident(args[0], "a generator name")
            argl = _expect_list(args[1], "a list of argument sorts")
            arg_sorts = tuple(_expect_sym(a, "a sort name") for a in argl.items)
            p.generators.append((name, arg_sorts, _expect_sym(args[2], "a result sort")))
        elif head in ("declare-datatype", "declare-codatatype"):
            self._arity(lst, 2)
            name = self._ident(args[0], "a datatype name")
            ctors = []
            for c in _expect_list(args[1], "a constructor list").items:
                cl = _expect_list(c, "a constructor (name (selector sort)*)")
                if not cl.items:
                    raise ParseError(cl.line, cl.col, "a constructor name")
                cname = self._ident(cl.items[0], "a constructor name")
                sels = []
                for s in cl.items[1:]:
                    sl = _expect_list(s, "a (selector sort) pair")
                    if len(sl.items) != 2:
                        raise ParseError(sl.line, sl.col, "a (selector sort) pair")
                    sels.append((self._ident(sl.items[0], "a selector name"), _expect_sym(sl.items[1], "a sort name")))
                ctors.append(Constructor(cname, tuple(sels)))
            kind = DATATYPE if head == "declare-datatype" else CODATATYPE
            p.datatypes.append(DatatypeDecl(name, kind, tuple(ctors)))
        elif head == "declare-const":
            self._arity(lst, 2)
            self.freeze(lst)
            name = self._ident(args[0], "a constant name")
            sort = _expect_sym(args[1], "a sort name")
            if sort not in p.signature.sorts:
                raise SortError(f"{args[1].line}:{args[1].col}: unknown sort {sort}")
            if any(v.name == name for v in p.consts):
                raise ParseError(args[0].line, args[0].col, f"a fresh name ({name} is already declared)")
            p.consts.append(Var(name, sort))
        elif head == "define-default":
            self._arity(lst, 3)
            self.freeze(lst)
            ctor = _expect_sym(args[0], "a constructor name")
            idx_s = _expect_sym(args[1], "a selector index")
            if not idx_s.isdigit():
                raise ParseError(args[1].line, args[1].col, "a positive selector index")
            t = self.term(args[2], {})
            p.defaults[(ctor, int(idx_s))] = t
        elif head == "assert":
            self._arity(lst, 1)
            self.freeze(lst)
            f = self.formula(args[0], {v.name: v for v in p.consts})
            try:
                check_formula(f, p.signature, p.selectors)
            except SortError as exc:
                raise type(exc)(f"{args[0].line}:{args[0].col}: {exc}") from None
            p.assertions.append(f)
        elif head in ("simplify", "check-sat"):
            self._arity(lst, 0)
            self.freeze(lst)
            p.command = head
        else:
            raise ParseError(lst.line, lst.col, "a known command")

    @staticmethod
    def _arity(lst: SList, n: int) -> None:
        if len(lst.items) - 1 != n:
            raise ParseError(lst.line, lst.col, f"{n} argument(s) to {lst.items[0].name}")  # type: ignore[union-attr]

    # -- terms and formulae

    def term(self, x: SExpr, scope: dict[str, Var]) -> Term:
        sig = self.p.signature
        sels = self.p.selectors
        if isinstance(x, Sym):
            if x.name in scope:
                return scope[x.name]
            if sig.has_generator(x.name):
                g = sig.generator(x.name)
                if g.arity:
                    raise ArityError(f"{x.line}:{x.col}: {g.name} expects {g.arity} argument(s)")
                return App(g.name, (), g.result_sort)
            raise ParseError(x.line, x.col, f"a variable or constant (unknown symbol {x.name})")
        if not x.items:
            raise ParseError(x.line, x.col, "a term")
        head = _expect_sym(x.items[0], "a generator or selector name")
        args = [self.term(a, scope) for a in x.items[1:]]
        if sig.has_generator(head):
            g = sig.generator(head)
            if len(args) != g.arity:
                raise ArityError(f"{x.line}:{x.col}: {head} expects {g.arity} argument(s), got {len(args)}")
            return App(head, tuple(args), g.result_sort)
        if head in sels:
            if len(args) != 1:
                raise ArityError(f"{x.line}:{x.col}: selector {head} takes one argument")
            return Sel(head, args[0], sels[head].result)
        raise ParseError(x.items[0].line, x.items[0].col, f"a generator or selector (unknown {head})")

    def formula(self, x: SExpr, scope: dict[str, Var]) -> Formula:
        if isinstance(x, Sym):
            if x.name == "true":
                return TRUE
            if x.name == "false":
                return FALSE
            raise ParseError(x.line, x.col, "a formula")
        if not x.items:
            raise ParseError(x.line, x.col, "a formula")
        head = _expect_sym(x.items[0], "a connective")
        args = x.items[1:]

        def need(k: int) -> None:
            if len(args) != k:
                raise ParseError(x.line, x.col, f"{k} argument(s) to {head}")

        if head == "=":
            need(2)
            return Eq(self.term(args[0], scope), self.term(args[1], scope))
        if head == "fin":
            need(1)
            return Fin(self.term(args[0], scope))
        if head == "not":
            need(1)
            return Not(self.formula(args[0], scope))
        if head in ("and", "or"):
            parts = tuple(self.formula(a, scope) for a in args)
            if not parts:
                return TRUE if head == "and" else FALSE
            if len(parts) == 1:
                return parts[0]
            return And(parts) if head == "and" else Or(parts)
        if head in ("=>", "<=>"):
            need(2)
            a, b = self.formula(args[0], scope), self.formula(args[1], scope)
            return Implies(a, b) if head == "=>" else Iff(a, b)
        if head in ("exists", "forall"):
            need(2)
            binders = _expect_list(args[0], "a binder list ((x sort) ...)")
            if not binders.items:
                raise ParseError(binders.line, binders.col, "at least one bound variable")
            inner = dict(scope)
            vs = []
            for b in binders.items:
                bl = _expect_list(b, "a (variable sort) pair")
                if len(bl.items) != 2:
                    raise ParseError(bl.line, bl.col, "a (variable sort) pair")
                name = self._ident(bl.items[0], "a variable name")
                sort = _expect_sym(bl.items[1], "a sort name")
                if sort not in self.p.signature.sorts:
                    raise SortError(f"{bl.items[1].line}:{bl.items[1].col}: unknown sort {sort}")
                if any(v.name == name for v in vs):
                    raise ParseError(bl.line, bl.col, f"distinct bound variables ({name} repeated)")
                v = Var(name, sort)
                vs.append(v)
                inner[name] = v
            body = self.formula(args[1], inner)
            return (Exists if head == "exists" else Forall)(tuple(vs), body)
        raise ParseError(x.items[0].line, x.items[0].col, f"a connective (got {head})")


def parse_problem(text: str) -> Problem:
    parser = _Parser()
    exprs = read_sexprs(text)
    for x in exprs:
        parser.command(x)
    if not parser.frozen:
        anchor = exprs[-1] if exprs else Sym("", 1, 1)
        parser.freeze(anchor)
    return parser.p


def parse_formula(text: str, problem: Problem, scope: dict[str, Var] | None = None) -> Formula:
    """Parse a single formula against an already parsed problem."""
    parser = _Parser()
    parser.p = problem
    parser.frozen = True
    exprs = read_sexprs(text)
    if len(exprs) != 1:
        raise ParseError(1, 1, "exactly one formula")
    sc = {v.name: v for v in problem.consts}
    sc.update(scope or {})
    return parser.formula(exprs[0], sc)
