"""Acceptance suite: one PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v`` (the lines bypass
output capture) or ``python tests/test_acceptance.py``.

Pinned tolerances: timings are the median of 5 runs after one warm-up;
every count criterion requires exactly 0 mismatches.
"""

from __future__ import annotations

import functools
import random
import statistics
import sys
import time
from pathlib import Path

import pytest

from conftest import CORPUS, REPO, sample, list_cover, fin_or_two, random_basic
from fintrees.basic import Contradiction, solve_basic
from fintrees.cli import Options, bench, histogram
from fintrees.datatypes import (
    DATATYPE,
    Constructor,
    DatatypeDecl,
    check_declarations,
    default_interpretation,
    default_table,
    eliminate_selectors_default,
    eliminate_selectors_standard,
    embed_in_trees,
    satisfiable_standard,
    truncated_domain,
)
from fintrees.formula import EqAtom, Exists, Not, free_variables
from fintrees.oracle import (
    Profile,
    all_valuations,
    domain_function,
    eval_closed_finite,
    eval_formula,
    extract_model,
    holds_solved,
    random_datatype_formula,
    random_finite_signature,
    random_formula,
)
from fintrees.problem import parse_problem
from fintrees.signature import analyze, compute_finite_sets, compute_zero_sets
from fintrees.solver import is_fully_simplified, solve
from fintrees.stats import Stats
from fintrees.terms import App, Var, u_var
from fintrees.trees import RationalTree

sys.path.insert(0, str(REPO / "benchmarks"))

SIG, AN = sample()

N_CLOSED, N_OPEN = 500, 200
N_BASIC, N_SCHEDULES = 100, 500
N_DATATYPE = 100


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail

    return emit


def median_ms(fn, runs: int = 5) -> float:
    fn()
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1000)
    return statistics.median(times)


# -- shared solver outputs (criteria 5 and 6 reuse them) ---------------------------------


@functools.cache
def list_cover_run():
    trace = []
    return solve(list_cover(), SIG, AN, trace=trace), trace


@functools.cache
def fin_or_two_run():
    f, (y, z) = fin_or_two()
    return solve(f, SIG, AN, free_vars=[y, z])


@functools.cache
def closed_runs():
    out = []
    for seed in range(N_CLOSED):
        sig = random_finite_signature(seed)
        an = analyze(sig)
        f = random_formula(seed, sig, Profile(max_quant_depth=3, max_atoms=8))
        out.append((sig, an, f, solve(f, sig, an)))
    return out


@functools.cache
def open_runs():
    out = []
    for k in range(N_OPEN):
        seed = 10_000 + k
        sig = random_finite_signature(seed)
        an = analyze(sig)
        f = random_formula(seed, sig, Profile(max_quant_depth=3, max_atoms=8, free_vars=1 + k % 2))
        fv = free_variables(f)
        out.append((sig, an, f, fv, solve(f, sig, an, free_vars=fv)))
    return out


# -- criteria ------------------------------------------------------------------------------


def test_criterion_1_sample_analysis(report):
    s0f, s0i = compute_zero_sets(SIG)
    an = compute_finite_sets(SIG)
    u = u_var("nat")
    bool_ = lambda b: App(b, (), "bool")  # noqa: E731
    checks = {
        "S_0I": s0i == {"bool"},
        "S_0F": s0f == {"inftree"},
        "S_FF": an.sff == {"inftree", "bool", "d"},
        "S_1I": an.s1i == {"nat"},
        "S_FI": an.sfi == {"bool", "nat", "t"},
        "d_fin": set(an.fin_inhabitants["d"]) == {App("c1", (bool_("true"),), "d"), App("c1", (bool_("false"),), "d")},
        "U_nat": set(an.u_equations("nat")) == {(u, App("succ", (u,), "nat"))},
        "t_infin": set(an.infin_inhabitants["t"]) == {App("g2", (bool_(b), u), "t") for b in ("false", "true")},
    }
    ms = median_ms(lambda: analyze(SIG))
    bad = [k for k, v in checks.items() if not v]
    report(1, not bad and ms < 10, f"sets {'exact' if not bad else 'differ: ' + ', '.join(bad)}; {ms:.2f} ms (< 10 ms)")


def test_criterion_2_list_cover(report):
    out, trace = list_cover_run()
    ms = median_ms(lambda: solve(list_cover(), SIG, AN))
    ok_trace = False
    if len(trace) == 1 and len(trace[0].cases) == 2:
        x = trace[0].target
        (z0, c0), (z1, c1) = trace[0].cases
        ok_trace = (
            x.sort == "list"
            and z0 == ()
            and c0.eqs == (EqAtom(x, App("nil", (), "list")),)
            and [v.sort for v in z1] == ["nat", "list"]
            and c1.eqs == (EqAtom(x, App("cons", z1, "list")),)
        )
    report(2, out.is_true and ok_trace and ms < 100, f"result {out.status}, trace {[str(i) for i in trace]}, {ms:.2f} ms (< 100 ms)")


def test_criterion_3_fin_or_two_models(report):
    out = fin_or_two_run()
    f, (y, z) = fin_or_two()
    ms = median_ms(lambda: solve(f, SIG, AN, free_vars=[y, z]))
    b = {n: RationalTree.leaf(n) for n in ("true", "false")}
    w = RationalTree.from_system({Var("w", "nat"): App("succ", (Var("w", "nat"),), "nat")}, [Var("w", "nat")])[Var("w", "nat")]
    domain = [RationalTree.apply("g1", [b[p], b[q]]) for p in b for q in b]
    domain += [RationalTree.apply("g2", [b[p], w]) for p in b]
    models = {
        (vy, vz)
        for vy in domain
        for vz in domain
        if out.status == "disjunction" and any(holds_solved(d.normal, {y: vy, z: vz}, AN) for d in out.disjuncts)
    }
    g2f, g2t = RationalTree.apply("g2", [b["false"], w]), RationalTree.apply("g2", [b["true"], w])
    expected = {(g2f, g2t), (g2t, g2f)}
    shown = sorted(f"({a}, {c})" for a, c in models)
    report(3, models == expected and ms < 1000, f"{len(domain) ** 2} valuations, models {shown}, {ms:.2f} ms (< 1 s)")


def test_criterion_4_oracle_equivalence(report):
    t0 = time.perf_counter()
    closed_bad = [
        f for sig, an, f, out in closed_runs() if out.status not in ("true", "false") or out.is_true != eval_closed_finite(f, sig, an)
    ]
    open_bad = []
    for sig, an, f, fv, out in open_runs():
        dom = domain_function(sig, an)
        g = out.formula(strip=False)
        for val in all_valuations(fv, dom):
            expected = eval_formula(f, val, dom)
            agree = eval_formula(g, val, dom) == expected
            if out.status == "disjunction":
                agree = agree and any(holds_solved(d.normal, val, an) for d in out.disjuncts) == expected
            if not agree:
                open_bad.append(f)
                break
    secs = time.perf_counter() - t0
    report(
        4,
        not closed_bad and not open_bad and secs < 300,
        f"{len(closed_bad)}/{N_CLOSED} closed and {len(open_bad)}/{N_OPEN} open mismatches, {secs:.1f} s (< 300 s)",
    )


def test_criterion_5_well_formed(report):
    outputs = [(AN, list_cover_run()[0]), (AN, fin_or_two_run())]
    outputs += [(an, out) for _, an, _, out in closed_runs()]
    outputs += [(an, out) for _, an, _, _, out in open_runs()]
    total = violations = 0
    for an, out in outputs:
        for d in out.disjuncts:
            total += 1
            violations += not is_fully_simplified(d, None, an)[0]
    report(5, violations == 0 and total > 0, f"{violations} violations over {total} disjuncts")


def test_criterion_6_witnesses(report):
    checked = failures = 0
    for sig, an, f, fv, out in open_runs():
        if out.status != "disjunction":
            continue
        dom = domain_function(sig, an)
        for d in out.disjuncts:
            checked += 1
            g = d.formula()
            try:
                val = extract_model(d, sig, an, free_vars=fv)
            except Exception:
                failures += 1
                continue
            neg = solve(Exists(tuple(fv), Not(g)), sig, an)
            falsified = any(not eval_formula(g, v, dom) for v in all_valuations(fv, dom))
            if not (eval_formula(g, val, dom) and eval_formula(f, val, dom) and neg.is_true and falsified):
                failures += 1
    report(6, failures == 0 and checked > 0, f"{failures} failures over {checked} fully simplified disjuncts")


def test_criterion_7_confluence(report):
    divergences = 0
    for k in range(N_BASIC):
        order, b = random_basic(k, SIG)
        n = len(b.eqs) + len(b.fins)
        ref = solve_basic(order, b, AN)
        for r in range(N_SCHEDULES):
            out = solve_basic(order, b, AN, stats=Stats(budget=10 * (n * n + n) + 50), rng=random.Random(r))
            same = (isinstance(out, Contradiction) and isinstance(ref, Contradiction)) or (
                not isinstance(out, Contradiction) and not isinstance(ref, Contradiction) and out.atoms() == ref.atoms()
            )
            if not same:
                divergences += 1
                break
    report(7, divergences == 0, f"{divergences} divergences over {N_BASIC} formulae x {N_SCHEDULES} schedules")


def test_criterion_8_frontend(report):
    decls = [
        DatatypeDecl("bool", DATATYPE, (Constructor("T"), Constructor("F"))),
        DatatypeDecl("opt", DATATYPE, (Constructor("none"), Constructor("some", (("val", "bool"),)))),
        DatatypeDecl("list", DATATYPE, (Constructor("nil"), Constructor("cons", (("head", "bool"), ("tail", "list"))))),
    ]
    ds = check_declarations(decls)
    an = analyze(ds.signature)
    doms = {s: truncated_domain(ds.signature, s, 3) for s in ds.signature.sorts}
    table = default_table(ds, an)
    sel = default_interpretation(ds, table)

    def tree_sat(g) -> bool:
        fv = free_variables(g)
        return solve(Exists(tuple(fv), g) if fv else g, ds.signature, an).is_true

    std_bad = def_bad = 0
    for seed in range(N_DATATYPE):
        f = random_datatype_formula(seed, ds)
        std = tree_sat(embed_in_trees(eliminate_selectors_standard(f, ds), ds))
        std_bad += std != satisfiable_standard(f, ds, doms.__getitem__)
        dflt = tree_sat(embed_in_trees(eliminate_selectors_default(f, ds, table), ds))
        expected = any(eval_formula(f, v, doms.__getitem__, sel) for v in all_valuations(free_variables(f), doms.__getitem__))
        def_bad += dflt != expected
    report(8, std_bad == 0 and def_bad == 0, f"{std_bad}/{N_DATATYPE} standard and {def_bad}/{N_DATATYPE} default-value mismatches")


def test_criterion_9_benchmarks(report, tmp_path):
    from generate_corpus import main as generate

    files = sorted(CORPUS.glob("*.tt"))
    generate(["generate_corpus", str(tmp_path)])
    fresh = sorted(tmp_path.glob("*.tt"))
    reproducible = [p.name for p in files] == [p.name for p in fresh] and all(
        a.read_text() == b.read_text() for a, b in zip(files, fresh)
    )
    conditions: set[int] = set()
    for p in files:
        prob = parse_problem(p.read_text())
        trace = []
        solve(prob.formula(), prob.signature, analyze(prob.signature), free_vars=prob.consts, trace=trace)
        conditions |= {i.condition for i in trace}
    rows = bench(CORPUS, Options(timeout_secs=10.0))
    hist = histogram(rows)
    labels = [h[0] for h in hist]
    expected_labels = ["< 1 ms", "< 10 ms", "< 100 ms", "< 1 s", "< 10 s", "timed out (> 10 s)", "total"]
    within = dict((h[0], h[2]) for h in hist)["< 10 s"]
    ok = len(files) >= 50 and reproducible and conditions == {1, 2, 3, 4} and labels == expected_labels and within >= 90
    report(
        9,
        ok,
        f"{len(files)} problems (reproducible: {reproducible}), conditions {sorted(conditions)}, "
        f"{within:.2f}% within 10 s (>= 90%), buckets {labels}",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([str(Path(__file__)), "-q"]))
