from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import CORPUS, SAMPLE_HEADER, sample_problem
from fintrees.cli import EXIT_ERROR, EXIT_OK, EXIT_TIMEOUT, BenchRow, Options, histogram, main, render_bench, run
from fintrees.errors import ArityError, ParseError, SortError
from fintrees.problem import parse_problem, read_sexprs

FIN_OR_TWO = SAMPLE_HEADER + """
(declare-const y t)
(declare-const z t)
(assert (forall ((x t)) (or (fin x) (= x y) (= x z))))
(simplify)
"""

LISTS = """
(declare-datatype bool ((T) (F)))
(declare-datatype list ((nil) (cons (head bool) (tail list))))
(declare-const l list)
(define-default cons 1 F)
(assert (and (= (head l) T) (= l nil)))
(check-sat)
"""


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_reader_positions():
    xs = read_sexprs("(a\n  (b c))")
    assert xs[0].items[1].line == 2 and xs[0].items[1].col == 3
    with pytest.raises(ParseError) as e:
        read_sexprs("(assert (= x x)")
    assert "1:16" in str(e.value) and "1:1" in str(e.value)
    with pytest.raises(ParseError):
        read_sexprs(")")


def test_parse_errors():
    with pytest.raises(SortError):
        sample_problem("(= zero true)")
    with pytest.raises(ArityError):
        sample_problem("(= (succ zero zero) zero)")
    with pytest.raises(ParseError):
        sample_problem("(= x zero)")
    with pytest.raises(ParseError):
        parse_problem("(declare-sort $s)")
    with pytest.raises(ParseError):
        parse_problem("(frobnicate)")


def test_datatype_problem():
    p = parse_problem(LISTS)
    assert p.has_datatypes and p.command == "check-sat"
    assert p.selectors["tail"].result == "list"


def test_run_semantics():
    p = parse_problem(LISTS)
    assert run(p, Options(semantics="standard")).status == "sat"
    # default semantics: head(nil) is F
    assert run(p, Options(semantics="defaults")).status == "unsat"


def test_main_fin_or_two_with_model(tmp_path, capsys):
    f = write(tmp_path, "fin_or_two.tt", FIN_OR_TWO)
    assert main([f, "--model"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "y = g2(" in out and "μw0. succ(w0)" in out


def test_model_lists_only_declared_constants(tmp_path, capsys):
    src = """
(declare-datatype nat ((zero) (succ (pred nat))))
(declare-datatype list ((nil) (cons (head nat) (tail list))))
(declare-const x list)
(assert (not (= x nil)))
(assert (= (head x) zero))
(check-sat)
"""
    f = write(tmp_path, "head.tt", src)
    assert main([f, "--model", "--output", "json"]) == EXIT_OK
    js = json.loads(capsys.readouterr().out)
    assert js["status"] == "sat"
    assert list(js["model"]) == ["x"]


def test_main_json(tmp_path, capsys):
    f = write(tmp_path, "fin_or_two.tt", FIN_OR_TWO)
    assert main([f, "--output", "json", "--print-analysis"]) == EXIT_OK
    js = json.loads(capsys.readouterr().out)
    assert js["status"] == "disjunction"
    assert len(js["disjuncts"]) == 2
    assert js["analysis"]["S1I"] == ["nat"]
    assert js["stats"]["wall_ms"] >= 0


def test_main_exit_codes(tmp_path, capsys):
    bad = write(tmp_path, "bad.tt", "(declare-sort s)\n(assert (= x x)")
    assert main([bad]) == EXIT_ERROR
    assert "2:1" in capsys.readouterr().err
    f = write(tmp_path, "fin_or_two.tt", FIN_OR_TWO)
    assert main([f, "--budget", "5"]) == EXIT_TIMEOUT
    assert main([str(tmp_path / "missing.tt")]) == EXIT_ERROR


def test_stdin_and_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "fintrees", "-", "--output", "sexpr"],
        input=SAMPLE_HEADER + "(assert (forall ((b bool)) (or (= b true) (= b false))))",
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0 and r.stdout.strip() == "true"


def test_histogram_buckets():
    rows = [BenchRow("a", "true", 0.5), BenchRow("b", "false", 50.0), BenchRow("c", "timeout", 10_001.0)]
    hist = histogram(rows)
    assert [h[0] for h in hist] == ["< 1 ms", "< 10 ms", "< 100 ms", "< 1 s", "< 10 s", "timed out (> 10 s)", "total"]
    assert [h[1] for h in hist] == [1, 1, 2, 2, 2, 1, 3]
    assert "errors" in [h[0] for h in histogram(rows + [BenchRow("d", "error: x", 1.0)])]
    assert render_bench(rows, "csv").splitlines()[0] == "file,status,ms,steps"


def test_bench_on_corpus_subset(tmp_path, capsys):
    for p in sorted(CORPUS.glob("c1_nat_*.tt")):
        (tmp_path / p.name).write_text(p.read_text())
    assert main(["--bench", str(tmp_path), "--output", "json"]) == EXIT_OK
    js = json.loads(capsys.readouterr().out)
    assert len(js["rows"]) == 4
    assert js["histogram"][-1] == {"bucket": "total", "count": 4, "percent": 100.0}
