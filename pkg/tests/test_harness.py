import json

from destcalc.evaluator import Command, Options
from destcalc.harness import (
    MetaReport, check_preservation_progress, meta_program, name_problems,
)
from destcalc.parser import parse_term, parse_value
from destcalc.program import load
from destcalc.stdlib import entry
from destcalc.syntax import OpenAmpar, Seq, Val, desugar


def cmd(left, focus, names):
    return Command((OpenAmpar(frozenset(names), parse_value(left)),), parse_term(focus, internal=True))


def test_names_ok():
    assert name_problems(cmd("[]1", "->1 <| ()", {1})) == []


def test_names_hole_twice():
    probs = name_problems(cmd("([]1, []1)", "->1 <| ()", {1}))
    assert any("occurs 2 times" in p for p in probs)


def test_names_missing_destination():
    probs = name_problems(cmd("[]1", "@()", {1}))
    assert any("no destination ->1" in p for p in probs)


def test_names_unowned():
    probs = name_problems(Command((), parse_term("->4 <| ()")))
    assert any("no open ampar" in p for p in probs)


def test_names_nested_clash():
    c = Command(
        (OpenAmpar(frozenset({1}), parse_value("[]1")),),
        parse_term("->1 <o> op{1}<[]1 & ->1 <| ()>", internal=True),
    )
    assert any("already open" in p for p in name_problems(c))


def test_meta_small_program_ok():
    t = desugar(parse_term("from' (upd (new : 1 (+) 1) with d -> d <| Inl <| ())"))
    rep = check_preservation_progress(t, name="inl")
    assert rep.ok, rep.failures
    assert rep.terminal and rep.value == "Inl ()"
    assert rep.checked == rep.steps + 1
    rec = json.loads(rep.to_record())
    assert rec["ok"] and rec["program"] == "inl"
    assert rep.summary().startswith("inl: ok,")


def test_meta_reports_stuck():
    from destcalc.syntax import App, UnitV

    rep = check_preservation_progress(App(Val(UnitV()), Val(UnitV())))
    assert not rep.ok and not rep.preservation


def test_meta_reports_budget():
    t = desugar(parse_term("((), ())"))
    rep = check_preservation_progress(t, max_steps=3)
    assert not rep.progress
    assert "no terminal state" in rep.failures[-1]["detail"]


def test_meta_ill_typed_program():
    rep = meta_program(load("main = from' (upd (new : 1) with d -> ())"))
    assert not rep.ok and "does not typecheck" in rep.failures[0]["detail"]


def test_mutation_is_caught():
    e = entry("dlist_demo")
    loaded = load(e.source())
    good = meta_program(loaded, name="good", every=50, dest_every=0)
    bad = meta_program(loaded, name="bad", every=50, dest_every=0, opts=Options(skip_fillcomp_shift=True))
    assert good.ok
    assert not bad.ok and not bad.freshness


def test_failures_are_capped():
    rep = MetaReport("x")
    for i in range(30):
        rep.fail("names", i, "bad")
    assert len(rep.failures) == 20 and not rep.ok
