from __future__ import annotations

import random
from pathlib import Path

import pytest
from hypothesis import settings

from fintrees.formula import And, BasicFormula, Eq, EqAtom, Exists, Fin, Forall, Not, Or
from fintrees.problem import parse_problem
from fintrees.signature import analyze, make_signature
from fintrees.terms import App, Var

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

REPO = Path(__file__).resolve().parent.parent
CORPUS = REPO / "benchmarks" / "corpus"

SAMPLE_GENS = [
    ("false", (), "bool"),
    ("true", (), "bool"),
    ("zero", (), "nat"),
    ("succ", ("nat",), "nat"),
    ("nil", (), "list"),
    ("cons", ("nat", "list"), "list"),
    ("tree1", ("inftree",), "inftree"),
    ("tree2", ("inftree", "inftree"), "inftree"),
    ("c1", ("bool",), "d"),
    ("c2", ("nat", "inftree"), "d"),
    ("g1", ("bool", "bool"), "t"),
    ("g2", ("bool", "nat"), "t"),
]
SAMPLE_SORTS = ["bool", "nat", "list", "inftree", "d", "t"]

SAMPLE_HEADER = "\n".join(
    [f"(declare-sort {s})" for s in SAMPLE_SORTS]
    + [f"(declare-gen {n} ({' '.join(a)}) {r})" for n, a, r in SAMPLE_GENS]
)


def sample():
    sig = make_signature(SAMPLE_SORTS, SAMPLE_GENS)
    return sig, analyze(sig)


@pytest.fixture(scope="session")
def sample_sig():
    return sample()


def c(name: str, sort: str, *args) -> App:
    return App(name, tuple(args), sort)


def list_cover():
    x, y, z = Var("x", "list"), Var("y", "nat"), Var("z", "list")
    nil = c("nil", "list")
    return Not(Exists((x,), And((Not(Eq(x, nil)), Not(Exists((y, z), Eq(x, c("cons", "list", y, z))))))))


def fin_or_two():
    x, y, z = Var("x", "t"), Var("y", "t"), Var("z", "t")
    return Forall((x,), Or((Fin(x), Eq(x, y), Eq(x, z)))), (y, z)


def sample_problem(body: str, decls: str = "", command: str = "simplify"):
    return parse_problem(f"{SAMPLE_HEADER}\n{decls}\n(assert {body})\n({command})\n")


def random_basic(seed: int, sig) -> tuple[list[Var], BasicFormula]:
    """A random flat conjunction over the sample sorts, with a shuffled variable order."""
    rng = random.Random(seed)
    vs = [Var(f"x{i}", rng.choice(["nat", "list", "inftree", "t", "bool"])) for i in range(rng.randint(2, 6))]
    eqs, fins = [], []
    for _ in range(rng.randint(1, 7)):
        v = rng.choice(vs)
        if rng.random() < 0.2:
            fins.append(v)
            continue
        same = [w for w in vs if w.sort == v.sort]
        if rng.random() < 0.4:
            eqs.append(EqAtom(v, rng.choice(same)))
            continue
        g = rng.choice(sig.gens_of(v.sort))
        args = []
        for a in g.arg_sorts:
            cand = [w for w in vs if w.sort == a]
            if not cand:
                w = Var(f"y{len(vs)}", a)
                vs.append(w)
                cand = [w]
            args.append(rng.choice(cand))
        eqs.append(EqAtom(v, App(g.name, tuple(args), v.sort)))
    order = list(vs)
    rng.shuffle(order)
    return order, BasicFormula(tuple(eqs), tuple(fins))
