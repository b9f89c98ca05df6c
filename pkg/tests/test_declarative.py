import pytest
from hypothesis import given, strategies as st

from destcalc.contexts import EMPTY, Binding, Ctx, VarKey
from destcalc.declarative import BUDGET, OK, REJECT, Unsupported, check_term_declarative, universe
from destcalc.harness import (
    compare_term, default_mode_universe, default_type_universe, enumerate_and_compare,
    enumerate_terms, enumerate_typed,
)
from destcalc.modes import ONE_NU
from destcalc.parser import parse_term, parse_type
from destcalc.syntax import UNIT, TSum, desugar, term_size
from destcalc.typecheck import check_term

from .test_typecheck import ACCEPT, REJECT as REJECTED


def _dec(src, g):
    return check_term_declarative(g, desugar(parse_term(src)), None)


def _supported(cases):
    out = []
    for c in cases:
        try:
            _dec(c[0], c[1])
            out.append(c)
        except Unsupported:
            pass
    return out


def test_tables_mostly_in_fragment():
    assert len(_supported(ACCEPT)) >= 10 and len(_supported(REJECTED)) >= 9


@pytest.mark.parametrize("src,g,ty", _supported(ACCEPT))
def test_accepts_agree(src, g, ty):
    assert _dec(src, g) == OK


@pytest.mark.parametrize("src,g,rule", _supported(REJECTED))
def test_rejects_agree(src, g, rule):
    assert _dec(src, g) == REJECT


def test_expected_type_is_respected():
    t = parse_term("to @()")
    assert check_term_declarative(EMPTY, t, parse_type("1 >< 1")) == OK
    assert check_term_declarative(EMPTY, t, parse_type("1")) == REJECT


def test_budget():
    t = desugar(parse_term("upd new : [1] with d -> d <! x ; y"))
    g = Ctx({VarKey("x"): Binding(ONE_NU, parse_type("[1]")), VarKey("y"): Binding(ONE_NU, UNIT)})
    assert check_term_declarative(g, t, None, budget=1) == BUDGET


def test_unsupported_forms():
    with pytest.raises(Unsupported):
        check_term_declarative(EMPTY, parse_term("new"), None)
    with pytest.raises(Unsupported):
        check_term_declarative(EMPTY, desugar(parse_term("fun x -> x")), None)


def test_universe():
    assert len(universe(2)) == 8


def test_enumeration_sizes_are_exact():
    modes = default_mode_universe()
    for n in range(1, 4):
        for t in enumerate_terms(n, ("x",), modes, (UNIT,)):
            assert term_size(t) == n
        for t, _ in enumerate_typed(n, (("x", UNIT),), modes, (UNIT,)):
            assert term_size(t) == n


def test_typed_enumeration_is_the_typed_part_of_full_enumeration():
    from destcalc.declarative import Search

    modes, news = default_mode_universe(), (UNIT, TSum(UNIT, UNIT))
    env = (("x", parse_type("[1]")),)
    typed = {t for t, _ in enumerate_typed(3, env, modes, news)}
    s = Search({}, 10**9, 0)
    full = set()
    for t in enumerate_terms(3, ("x",), modes, news):
        try:
            s.synth(t, {VarKey("x"): env[0][1]})
            full.add(t)
        except Exception:
            pass
    assert typed == full


def test_agreement_small():
    rep = enumerate_and_compare(4, untyped_bound=2)
    assert rep.ok, rep.disagreements[:5]
    assert rep.accepted > 100


TYPES = default_type_universe()
MODES = default_mode_universe()
_POOL = {}


def _pool(i):
    if i not in _POOL:
        env = (("x", TYPES[i]),)
        _POOL[i] = [t for n in (5,) for t in enumerate_typed(n, env, MODES, TYPES[:3])]
    return _POOL[i]


@given(st.integers(0, len(TYPES) - 1), st.integers(0, 10**6), st.sampled_from(MODES))
def test_agreement_random_size5(i, k, m):
    pool = _pool(i)
    t, ty = pool[k % len(pool)]
    g = Ctx({VarKey("x"): Binding(m, TYPES[i])})
    alg, dec = compare_term(g, t, ty)
    assert alg == dec
