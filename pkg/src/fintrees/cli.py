"""Command-line driver: ``fintrees PROBLEM`` or ``fintrees --bench DIR``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .datatypes import (
    default_table,
    eliminate_selectors_default,
    eliminate_selectors_standard,
    embed_in_trees,
    has_selectors,
)
from .errors import SortError, Timeout, TreeTheoryError
from .formula import Exists, Formula, free_variables
from .oracle import Profile, candidate_pool, extract_model, random_formula
from .problem import Problem, parse_problem
from .render import pretty, sexpr
from .signature import SortAnalysis, analyze
from .solver import SolveOutcome, solve
from .stats import DEFAULT_BUDGET, Stats
from .terms import Var
from .trees import RationalTree

EXIT_OK, EXIT_ERROR, EXIT_TIMEOUT = 0, 1, 2
BUCKETS_MS = (1, 10, 100, 1000, 10000)


@dataclass
class Options:
    mode: str | None = None  # trees | datatypes; inferred from the declarations
    semantics: str = "standard"
    budget: int | None = DEFAULT_BUDGET
    timeout_secs: float | None = None
    print_analysis: bool = False
    model: bool = False
    output: str = "pretty"
    seed: int | None = None
    strip: bool = True


@dataclass
class Report:
    status: str
    outcome: SolveOutcome | None = None
    formula: Formula | None = None
    model: dict[Var, RationalTree] | None = None
    analysis: SortAnalysis | None = None
    stats: Stats | None = None
    wall_ms: float = 0.0
    notes: list[str] = field(default_factory=list)

    def disjunct_formulae(self, strip: bool = True) -> list[Formula]:
        if self.outcome is None or self.outcome.status != "disjunction":
            return []
        return [d.formula(strip) for d in self.outcome.disjuncts]

    def render(self, output: str, strip: bool = True) -> str:
        if output == "json":
            return json.dumps(self.to_json(strip), indent=2, ensure_ascii=False)
        show = sexpr if output == "sexpr" else pretty
        lines = []
        if self.analysis is not None:
            lines.append(json.dumps(self.analysis.to_json(), indent=2, ensure_ascii=False))
        if self.formula is not None and output == "pretty":
            lines.append(f"; formula: {pretty(self.formula)}")
        lines += [f"; {n}" for n in self.notes]
        if self.status == "disjunction":
            ds = self.disjunct_formulae(strip)
            lines += [show(d) for d in ds] if output == "sexpr" else [" ∨\n".join(show(d) for d in ds)]
        else:
            lines.append(self.status)
        if self.model is not None:
            for v, t in self.model.items():
                lines.append(f"{v.name} = {t.to_sexpr() if output == 'sexpr' else t}")
        return "\n".join(lines)

    def to_json(self, strip: bool = True) -> dict:
        out: dict = {
            "status": self.status,
            "disjuncts": [sexpr(d) for d in self.disjunct_formulae(strip)],
            "stats": {**(self.stats.to_json() if self.stats else {}), "wall_ms": round(self.wall_ms, 3)},
        }
        if self.model is not None:
            out["model"] = {v.name: t.to_sexpr() for v, t in self.model.items()}
        if self.analysis is not None:
            out["analysis"] = self.analysis.to_json()
        if self.formula is not None:
            out["formula"] = sexpr(self.formula)
        if self.notes:
            out["notes"] = self.notes
        return out


def to_tree_formula(problem: Problem, f: Formula, opts: Options, analysis: SortAnalysis) -> tuple[Formula, list[str]]:
    """Apply the datatype pipeline when requested; returns the formula and notes."""
    mode = opts.mode or ("datatypes" if problem.has_datatypes else "trees")
    notes: list[str] = []
    if mode == "trees":
        if has_selectors(f):
            raise SortError("selectors need --mode datatypes")
        return f, notes
    if problem.dsig is None:
        raise SortError("--mode datatypes needs (co)datatype declarations")
    dsig = problem.dsig
    if opts.semantics == "defaults":
        table = default_table(dsig, analysis, problem.default_trees())
        g = eliminate_selectors_default(f, dsig, table)
    elif has_selectors(f):
        g = eliminate_selectors_standard(f, dsig)
        notes.append("standard selector semantics: result is equisatisfiable, not equivalent")
    else:
        g = f
    return embed_in_trees(g, dsig), notes


def run(problem: Problem, opts: Options | None = None) -> Report:
    opts = opts or Options()
    t0 = time.perf_counter()
    sig = problem.signature
    analysis = analyze(sig)
    f = problem.formula()
    shown = None
    if opts.seed is not None:
        f = random_formula(opts.seed, sig, Profile(max_quant_depth=2, max_atoms=6), free=problem.consts)
        shown = f
    g, notes = to_tree_formula(problem, f, opts, analysis)
    consts = list(problem.consts)
    free = consts + [v for v in free_variables(g) if v not in consts]
    stats = Stats.with_timeout(opts.budget, opts.timeout_secs)
    command = problem.command or "simplify"
    model = None
    if command == "check-sat":
        closed = Exists(tuple(free), g) if free else g
        out = solve(closed, sig, analysis, stats=stats)
        status = "sat" if out.is_true else "unsat"
        if opts.model and out.is_true:
            opened = solve(g, sig, analysis, free_vars=free, stats=stats)
            model = _model(opened, sig, analysis, free)
    else:
        out = solve(g, sig, analysis, free_vars=free, stats=stats)
        status = out.status
        if opts.model and not out.is_false:
            model = _model(out, sig, analysis, free)
    if model is not None and consts:
        # variables introduced by selector elimination are internal
        model = {v: model[v] for v in consts}
    return Report(
        status=status,
        outcome=out,
        formula=shown,
        model=model,
        analysis=analysis if opts.print_analysis else None,
        stats=stats,
        wall_ms=(time.perf_counter() - t0) * 1000,
        notes=notes,
    )


def _model(out: SolveOutcome, sig, analysis: SortAnalysis, free: Sequence[Var]) -> dict[Var, RationalTree]:
    if out.is_true:
        return {v: candidate_pool(sig, analysis, v.sort)[0] for v in free}
    val = extract_model(out.disjuncts[0], sig, analysis, free_vars=free)
    return {v: val[v] for v in free}


# -- benchmarks ------------------------------------------------------------------------

@dataclass
class BenchRow:
    file: str
    status: str
    ms: float
    steps: int = 0


def _bench_one(args: tuple[str, Options]) -> BenchRow:
    path, opts = args
    t0 = time.perf_counter()
    try:
        problem = parse_problem(Path(path).read_text(encoding="utf-8"))
        rep = run(problem, opts)
        return BenchRow(path, rep.status, (time.perf_counter() - t0) * 1000, rep.stats.steps if rep.stats else 0)
    except Timeout:
        return BenchRow(path, "timeout", (time.perf_counter() - t0) * 1000)
    except TreeTheoryError as exc:
        return BenchRow(path, f"error: {exc}", (time.perf_counter() - t0) * 1000)


def bench(directory: str | Path, opts: Options | None = None, jobs: int = 1, pattern: str = "*.tt") -> list[BenchRow]:
    opts = opts or Options()
    if opts.timeout_secs is None:
        opts.timeout_secs = 10.0
    files = sorted(str(p) for p in Path(directory).glob(pattern))
    work = [(f, opts) for f in files]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_bench_one, work))
    return [_bench_one(w) for w in work]


def histogram(rows: Sequence[BenchRow]) -> list[tuple[str, int, float]]:
    """Cumulative counts per time bucket, then timed-out, errors (if any) and total rows."""
    total = len(rows)
    solved = [r.ms for r in rows if r.status != "timeout" and not r.status.startswith("error")]
    out = []
    for edge in BUCKETS_MS:
        label = f"< {edge // 1000} s" if edge >= 1000 else f"< {edge} ms"
        n = sum(1 for ms in solved if ms < edge)
        out.append((label, n, 100.0 * n / total if total else 0.0))
    errors = sum(1 for r in rows if r.status.startswith("error"))
    timed_out = total - out[-1][1] - errors
    pct = lambda n: 100.0 * n / total if total else 0.0  # noqa: E731
    out.append((f"timed out (> {BUCKETS_MS[-1] // 1000} s)", timed_out, pct(timed_out)))
    if errors:
        out.append(("errors", errors, pct(errors)))
    out.append(("total", total, 100.0 if total else 0.0))
    return out


def render_bench(rows: Sequence[BenchRow], output: str) -> str:
    hist = histogram(rows)
    if output == "json":
        return json.dumps(
            {
                "rows": [r.__dict__ for r in rows],
                "histogram": [{"bucket": b, "count": n, "percent": round(p, 2)} for b, n, p in hist],
            },
            indent=2,
        )
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["file", "status", "ms", "steps"])
    for r in rows:
        w.writerow([r.file, r.status, f"{r.ms:.3f}", r.steps])
    buf.write("\n")
    w.writerow(["time to solve", "count", "percent"])
    for b, n, p in hist:
        w.writerow([b, n, f"{p:.2f}%"])
    return buf.getvalue()


# -- entry point ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fintrees", description="Decide and simplify formulae over finite and infinite trees.")
    ap.add_argument("file", nargs="?", help="problem file ('-' for stdin)")
    ap.add_argument("--mode", choices=["trees", "datatypes"])
    ap.add_argument("--semantics", choices=["standard", "defaults"], default="standard")
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="rule-application budget")
    ap.add_argument("--timeout-secs", type=float)
    ap.add_argument("--print-analysis", action="store_true")
    ap.add_argument("--model", action="store_true")
    ap.add_argument("--output", choices=["pretty", "sexpr", "json"], default="pretty")
    ap.add_argument("--seed", type=int, help="replace the assertions by a random formula")
    ap.add_argument("--no-strip", action="store_true", help="print disjuncts without removing conjuncts repeated from alpha")
    ap.add_argument("--bench", metavar="DIR")
    ap.add_argument("--jobs", type=int, default=1)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    opts = Options(
        mode=ns.mode,
        semantics=ns.semantics,
        budget=ns.budget,
        timeout_secs=ns.timeout_secs,
        print_analysis=ns.print_analysis,
        model=ns.model,
        output=ns.output,
        seed=ns.seed,
        strip=not ns.no_strip,
    )
    if ns.bench:
        rows = bench(ns.bench, opts, jobs=ns.jobs)
        print(render_bench(rows, ns.output), end="")
        return EXIT_OK
    if not ns.file:
        ap.error("a problem file or --bench DIR is required")
    try:
        text = sys.stdin.read() if ns.file == "-" else Path(ns.file).read_text(encoding="utf-8")
        rep = run(parse_problem(text), opts)
    except Timeout as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        if ns.output == "json":
            print(json.dumps({"status": "timeout", "disjuncts": [], "stats": {}}))
        else:
            print("timeout")
        return EXIT_TIMEOUT
    except (TreeTheoryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(rep.render(ns.output, opts.strip))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
