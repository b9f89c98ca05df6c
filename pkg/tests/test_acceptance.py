"""Acceptance criteria 1 to 8. Each test records one pass/fail line."""

import math
from itertools import product

import pytest

from destcalc.evaluator import run
from destcalc.harness import check_entry, enumerate_and_compare, meta_corpus
from destcalc.modes import MANY_INF, ONE_INF, ONE_NU, Mode, Mult
from destcalc.program import load
from destcalc.stdlib import (
    decode_list, decode_tree, encode_list, encode_tree, entry, literal, relabel_reference,
)
from destcalc.syntax import (
    InlV, InrV, ModV, PairV, SInl, SInr, SMod, SPair, SUnit, To, UnitV, Val, desugar, from_prime,
)

from . import oracles
from .acceptance_log import record


def _mode(m):
    return Mode(Mult.ONE if m[0] == "1" else Mult.MANY, None if m[1] == math.inf else m[1])


def test_criterion_1_semiring():
    uni = oracles.universe(4)
    modes = [_mode(m) for m in uni]
    bad = []
    for a, b in product(uni, repeat=2):
        x, y = _mode(a), _mode(b)
        if x + y != _mode(oracles.add(a, b)):
            bad.append(f"{x}+{y}")
        if x * y != _mode(oracles.mul(a, b)):
            bad.append(f"{x}*{y}")
        if (x <= y) != oracles.le(a, b):
            bad.append(f"{x}<={y}")
    laws = 0
    for m, n, o in product(modes, repeat=3):
        laws += 1
        if not (m + n == n + m and (m + n) + o == m + (n + o) and (m * n) * o == m * (n * o)
                and m * (n + o) == m * n + m * o and (n + o) * m == n * m + o * m):
            bad.append(f"law at {m},{n},{o}")
    for (m, m2), (n, n2) in product([(a, b) for a, b in product(modes, repeat=2) if a <= b], repeat=2):
        if not (m + n <= m2 + n2 and m * n <= m2 * n2):
            bad.append(f"monotonicity at {m},{n}")
    record(1, not bad, f"{len(uni) ** 2} table cells x 3 tables, {laws} law triples"
           + (f"; mismatches {bad[:3]}" if bad else ""))


NEGATIVE = {"forget": "TY-TERM-UPDA", "ambiguous1": "TY-TERM-UPDA", "ambiguous2": "TY-TERM-UPDA",
            "escape": "TY-TERM-UPDA"}


def test_criterion_2_negative_corpus():
    out = []
    for name, rule in NEGATIVE.items():
        e = entry(name)
        r = check_entry(e)
        out.append((name, r.ok and e.rule == rule, r.detail))
    r = check_entry(entry("sound"))
    out.append(("sound", r.ok, r.detail))
    bad = [f"{n}: {d}" for n, ok, d in out if not ok]
    record(2, not bad, "4 rejections at TY-TERM-UPDA, sound accepted" if not bad else "; ".join(bad))


def _shapes(n):
    if n == 0:
        yield None
        return
    for k in range(n):
        for left in _shapes(k):
            for right in _shapes(n - 1 - k):
                yield (0, left, right)


LARGE = [
    (0, (0, (0, None, None), (0, None, None)), (0, (0, None, None), (0, None, None))),
    (0, (0, (0, (0, (0, (0, (0, None, None), None), None), None), None), None), None),
    (0, None, (0, None, (0, None, (0, None, (0, None, (0, None, None)))))),
    (0, (0, None, (0, (0, None, None), None)), (0, (0, None, None), None)),
    (0, (0, (0, None, None), None), (0, None, (0, None, None))),
    (0, (0, None, None), (0, (0, None, None), (0, None, (0, None, None)))),
]


def _relabel(tree):
    src = f"-- ext: rec\nmain : Tree Nat = relabelDPS {literal(encode_tree(tree, lambda _: UnitV()))}\n"
    return decode_tree(run(load(src).term).value)


def _map(xs):
    src = f"-- ext: rec\nmain : List Nat = map succ {literal(encode_list(xs))}\n"
    return decode_list(run(load(src).term).value)


def test_criterion_3_positive_corpus():
    bad = []
    r = check_entry(entry("dlist_demo"))
    if not (r.ok and entry("dlist_demo").value == [0, 1, 0, 2]):
        bad.append(f"dlist_demo: {r.detail}")
    lists = [[0, 0, 0], [1, 2, 3], [3, 0, 5], [2, 2, 0], [4, 1, 1], [0, 6, 2]]
    for xs in lists:
        got = _map(xs)
        if got != [x + 1 for x in xs]:
            bad.append(f"map succ {xs} gave {got}")
    trees = [t for n in range(5) for t in _shapes(n)] + LARGE
    for t in trees:
        got = _relabel(t)
        if got != relabel_reference(t):
            bad.append(f"relabel {t} gave {got}")
    record(3, not bad, f"dlist demo, {len(lists)} maps, {len(trees)} trees up to 7 nodes"
           + (f"; {bad[:3]}" if bad else ""))


@pytest.fixture(scope="module")
def reports():
    return meta_corpus(every=1, dest_every=50)


def _steps(reports):
    return sum(r.steps for r in reports)


def test_criterion_4_preservation(reports):
    bad = [r.summary() for r in reports if not r.preservation]
    checked = sum(r.checked for r in reports)
    record(4, not bad and checked > 100, f"{checked} commands re-typed over {len(reports)} traces"
           + (f"; {bad[:2]}" if bad else ""))


def test_criterion_5_progress(reports):
    bad = [r.summary() for r in reports if not (r.progress and r.terminal)]
    record(5, not bad, f"{len(reports)} traces, {_steps(reports)} steps, all terminal"
           + (f"; {bad[:2]}" if bad else ""))


def test_criterion_6_names(reports):
    bad = [r.summary() for r in reports if not (r.names and r.freshness and r.dest_modes)]
    record(6, not bad, f"names and freshness audited at all {_steps(reports) + len(reports)} commands"
           + (f"; {bad[:2]}" if bad else ""))


def test_criterion_7_differential():
    rep = enumerate_and_compare(6)
    record(7, rep.ok and rep.unsupported == 0, rep.summary()
           + (f"; first {rep.disagreements[0]}" if rep.disagreements else ""))


SAMPLES = [
    UnitV(),
    InlV(UnitV()),
    InrV(PairV(UnitV(), InlV(UnitV()))),
    ModV(MANY_INF, PairV(UnitV(), UnitV())),
    PairV(ModV(ONE_NU, InrV(UnitV())), ModV(ONE_INF, UnitV())),
    InlV(InrV(InlV(ModV(Mode(Mult.MANY, 2), UnitV())))),
]

CONSTRUCTORS = [
    (SUnit(), UnitV()),
    (SInl(SUnit()), InlV(UnitV())),
    (SInr(SUnit()), InrV(UnitV())),
    (SPair(SUnit(), SInl(SUnit())), PairV(UnitV(), InlV(UnitV()))),
    (SMod(MANY_INF, SUnit()), ModV(MANY_INF, UnitV())),
]


def test_criterion_8_sugar():
    bad = [v for v in SAMPLES if run(from_prime(To(Val(v)))).value != v]
    bad += [s for s, v in CONSTRUCTORS if run(desugar(s)).value != v]
    record(8, not bad, f"{len(SAMPLES)} round trips, {len(CONSTRUCTORS)} constructors"
           + (f"; failing {bad[:2]}" if bad else ""))
