import pytest

from destcalc.contexts import (
    EMPTY, Binding, ContextError, Ctx, DestKey, HoleKey, VarKey, ctx_add, ctx_scale,
    disposable_only, holes_from_dests, render,
)
from destcalc.modes import MANY_INF, ONE_NU, ONE_UP, Mode, Mult
from destcalc.syntax import UNIT, TDest, TSum

B = TSum(UNIT, UNIT)
W = Mode(Mult.MANY, 0)


def ctx(**kw):
    return Ctx({VarKey(k): Binding(m, t) for k, (m, t) in kw.items()})


def test_add_disjoint_and_shared():
    a = ctx(x=(ONE_NU, UNIT))
    b = ctx(x=(ONE_NU, UNIT), y=(ONE_UP, B))
    s = ctx_add(a, b)
    assert s[VarKey("x")].mode == W
    assert s[VarKey("y")].mode == ONE_UP
    assert ctx_add(EMPTY, a) == a


def test_add_type_clash():
    with pytest.raises(ContextError):
        ctx_add(ctx(x=(ONE_NU, UNIT)), ctx(x=(ONE_NU, B)))


def test_hole_and_dest_clash():
    d = Ctx({DestKey(1): Binding(ONE_NU, TDest(ONE_NU, UNIT))})
    h = Ctx({HoleKey(1): Binding(ONE_NU, UNIT)})
    with pytest.raises(ContextError):
        ctx_add(d, h)


def test_dest_binding_needs_dest_type():
    with pytest.raises(ContextError):
        Ctx({DestKey(1): Binding(ONE_NU, UNIT)})


def test_scale():
    g = Ctx({VarKey("x"): Binding(ONE_UP, UNIT), HoleKey(2): Binding(ONE_UP, UNIT)})
    s = ctx_scale(ONE_UP, g)
    assert s[VarKey("x")].mode == Mode(Mult.ONE, 2)
    assert s[HoleKey(2)].mode == ONE_UP
    assert ctx_scale(ONE_UP, g, literal_holes=False)[HoleKey(2)].mode == Mode(Mult.ONE, 2)


def test_disposable_only():
    assert disposable_only(EMPTY)
    assert disposable_only(ctx(x=(MANY_INF, UNIT), y=(W, B)))
    assert not disposable_only(ctx(x=(ONE_NU, UNIT)))


def test_holes_from_dests():
    d = Ctx({DestKey(3): Binding(ONE_NU, TDest(ONE_UP, B))})
    h = holes_from_dests(d)
    assert h[HoleKey(3)] == Binding(ONE_UP, B)
    with pytest.raises(ContextError):
        holes_from_dests(Ctx({DestKey(3): Binding(ONE_UP, TDest(ONE_NU, B))}))


def test_kind_and_render():
    assert ctx(x=(ONE_NU, UNIT)).kind == "Γ"
    assert Ctx({HoleKey(1): Binding(ONE_NU, UNIT)}).kind == "Θ"
    assert EMPTY.kind == "Δ"
    assert render(ctx(x=(ONE_NU, UNIT))) == "x :1v 1"


def test_shift():
    d = Ctx({DestKey(1): Binding(ONE_NU, TDest(ONE_NU, UNIT)), DestKey(2): Binding(ONE_NU, TDest(ONE_NU, UNIT))})
    s = d.shift(frozenset({1}), 10)
    assert DestKey(11) in s and DestKey(2) in s and DestKey(1) not in s
