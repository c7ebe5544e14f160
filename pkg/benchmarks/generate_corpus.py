"""Write the bundled benchmark corpus (``benchmarks/corpus/*.tt``).

Hand-shaped families target each of the four instantiation conditions; the
remaining problems are random formulae over the same signature.  The output
is deterministic.

    python benchmarks/generate_corpus.py [OUT_DIR]
"""

from __future__ import annotations

import sys
from pathlib import Path

from fintrees.oracle import Profile, random_formula
from fintrees.render import sexpr
from fintrees.signature import make_signature
from fintrees.terms import Var

HEADER = """\
(declare-sort bool) (declare-sort nat) (declare-sort list)
(declare-sort inftree) (declare-sort d) (declare-sort t)
(declare-gen false () bool) (declare-gen true () bool)
(declare-gen zero () nat) (declare-gen succ (nat) nat)
(declare-gen nil () list) (declare-gen cons (nat list) list)
(declare-gen tree1 (inftree) inftree) (declare-gen tree2 (inftree inftree) inftree)
(declare-gen c1 (bool) d) (declare-gen c2 (nat inftree) d)
(declare-gen g1 (bool bool) t) (declare-gen g2 (bool nat) t)
"""

SIG = make_signature(
    ["bool", "nat", "list", "inftree", "d", "t"],
    [
        ("false", (), "bool"), ("true", (), "bool"), ("zero", (), "nat"), ("succ", ("nat",), "nat"),
        ("nil", (), "list"), ("cons", ("nat", "list"), "list"), ("tree1", ("inftree",), "inftree"),
        ("tree2", ("inftree", "inftree"), "inftree"), ("c1", ("bool",), "d"), ("c2", ("nat", "inftree"), "d"),
        ("g1", ("bool", "bool"), "t"), ("g2", ("bool", "nat"), "t"),
    ],
)


def succ_n(n: int, base: str = "zero") -> str:
    t = base
    for _ in range(n):
        t = f"(succ {t})"
    return t


def families() -> list[tuple[str, str, str]]:
    """(name, declarations of constants, body) triples."""
    out: list[tuple[str, str, str]] = []
    # condition 1: a generator equation in a nested conjunct
    for n in range(1, 5):
        body = f"(forall ((x nat)) (or (= x zero) (exists ((y nat)) (= x {succ_n(n - 1, '(succ y)')}))))"
        out.append((f"c1_nat_{n}", "", body))
    for n in range(1, 5):
        inner = "z"
        for _ in range(n):
            inner = f"(cons y {inner})"
        out.append((f"c1_list_{n}", "", f"(forall ((x list)) (or (= x nil) (exists ((y nat) (z list)) (= x {inner}))))"))
    for n in range(1, 4):
        out.append((f"c1_open_{n}", "(declare-const a list)",
                    f"(not (exists ((y nat) (z list)) (and (= a (cons y z)) (= y {succ_n(n)}))))"))
    # condition 2: a variable of a sort with finitely many trees occurs in a nested conjunct
    out.append(("c2_bool", "", "(forall ((b bool)) (or (= b true) (= b false)))"))
    out.append(("c2_bool_pair", "", "(forall ((a bool) (b bool)) (or (= a b) (= a true) (= b true)))"))
    out.append(("c2_d", "(declare-const p bool)", "(forall ((b bool)) (or (= p b) (not (= (c1 p) (c1 b)))))"))
    for n in range(1, 4):
        out.append((f"c2_g2_{n}", "(declare-const u t)",
                    f"(forall ((b bool)) (not (= u (g2 b {succ_n(n)}))))"))
    out.append(("c2_t", "(declare-const u t)", "(forall ((a bool) (b bool)) (not (= u (g1 a b))))"))
    # condition 3: fin on a variable of a sort with finitely many finite trees
    for k in range(1, 4):
        names = [f"a{i}" for i in range(k)]
        decls = " ".join(f"(declare-const {a} d)" for a in names)
        neqs = " ".join(f"(not (= x {a}))" for a in names)
        out.append((f"c3_neq_{k}", decls, f"(exists ((x d)) (and (fin x) {neqs}))"))
    out.append(("c3_d", "", "(forall ((x d)) (=> (fin x) (or (= x (c1 true)) (= x (c1 false)))))"))
    out.append(("c3_d_open", "(declare-const x d)", "(and (fin x) (not (= x (c1 true))))"))
    out.append(("c3_inftree", "", "(forall ((x inftree)) (not (fin x)))"))
    out.append(("c3_bool_d", "(declare-const b bool)", "(exists ((x d)) (and (fin x) (not (= x (c1 b)))))"))
    # condition 4: a nested conjunct made of fin atoms only, sort with finitely many infinite trees
    out.append(("c4_fin_or_two", "(declare-const y t) (declare-const z t)",
                "(forall ((x t)) (or (fin x) (= x y) (= x z)))"))
    out.append(("c4_nat", "", "(forall ((x nat)) (or (fin x) (= x (succ x))))"))
    out.append(("c4_nat_open", "(declare-const y nat)", "(forall ((x nat)) (or (fin x) (= x y)))"))
    out.append(("c4_t_one", "(declare-const y t)", "(forall ((x t)) (or (fin x) (= x y)))"))
    out.append(("c4_t_three", "(declare-const y t) (declare-const z t) (declare-const w t)",
                "(forall ((x t)) (or (fin x) (= x y) (= x z) (= x w)))"))
    out.append(("c1_list_cover", "", "(not (exists ((x list)) (and (not (= x nil)) (not (exists ((y nat) (z list)) (= x (cons y z)))))))"))
    return out


def random_problems(count: int) -> list[tuple[str, str, str]]:
    out = []
    free = [Var("k0", "nat"), Var("k1", "list")]
    for seed in range(count):
        fv = free[: seed % 3]
        f = random_formula(1000 + seed, SIG, Profile(max_quant_depth=2, max_atoms=5, term_depth=1), free=fv)
        decls = " ".join(f"(declare-const {v.name} {v.sort})" for v in fv)
        out.append((f"rand_{seed:03d}", decls, sexpr(f)))
    return out


def main(argv: list[str]) -> int:
    target = Path(argv[1]) if len(argv) > 1 else Path(__file__).resolve().parent / "corpus"
    target.mkdir(parents=True, exist_ok=True)
    problems = families() + random_problems(34)
    for name, decls, body in problems:
        text = HEADER + (decls + "\n" if decls else "") + f"(assert {body})\n(simplify)\n"
        (target / f"{name}.tt").write_text(text, encoding="utf-8")
    print(f"wrote {len(problems)} problems to {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
