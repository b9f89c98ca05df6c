import pytest
from hypothesis import given, strategies as st

from destcalc.modes import ONE_INF, ONE_NU
from destcalc.parser import parse_term, parse_type, parse_value
from destcalc.syntax import (
    UNIT, AmparV, App, CaseProd, DestV, FillLeaf, FunV, HoleV, InlV, ModV, PairV,
    SInl, SLam, SPair, SUnit, Seq, TRec, TRecVar, TSum, UnitV, Upd, Val, Var,
    desugar, free_vars, has_sugar, pretty, pretty_type, pretty_value, shift_value,
    subst, term_names, term_size, type_eq, unfold, value_names,
)

from .strategies import data_values, terms, types, values


@given(types)
def test_type_roundtrip(t):
    assert parse_type(pretty_type(t)) == t


@given(values)
def test_value_roundtrip(v):
    assert parse_value(pretty_value(v)) == v


@given(terms)
def test_term_roundtrip(t):
    assert parse_term(pretty(t), internal=True) == t


@given(terms)
def test_desugar_identity_on_core(t):
    assert desugar(t) is t


def test_desugar_removes_sugar():
    t = SPair(SInl(SUnit()), App(SLam("x", ONE_NU, Var("x")), SUnit()))
    assert has_sugar(t)
    assert not has_sugar(desugar(t))


def test_desugar_unit_shape():
    d = desugar(SUnit())
    assert "upd new with %d -> %d <| ()" in pretty(d)


def test_free_vars_and_subst():
    t = Upd(Var("a"), "x", Seq(Var("x"), Var("y")))
    assert free_vars(t) == {"a", "y"}
    s = subst(t, "x", Val(UnitV()))
    assert s == Upd(Var("a"), "x", Seq(Var("x"), Var("y")))
    s = subst(t, "y", Val(UnitV()))
    assert s == Upd(Var("a"), "x", Seq(Var("x"), Val(UnitV())))


@given(terms)
def test_subst_removes_variable(t):
    for x in free_vars(t):
        assert x not in free_vars(subst(t, x, Val(UnitV())))


def test_size():
    assert term_size(CaseProd(ONE_NU, Var("p"), "a", "b", Seq(Var("a"), Var("b")))) == 5


def test_value_names_respect_binders():
    v = AmparV(frozenset({1}), PairV(HoleV(1), DestV(2)), DestV(1))
    assert value_names(v) == {2}
    assert term_names(FillLeaf(Val(DestV(3)), Val(v))) == {2, 3}


@given(values, st.integers(1, 20))
def test_shift_moves_only_free_names(v, k):
    free = value_names(v)
    w = shift_value(v, frozenset(free), k)
    assert value_names(w) == {h + k for h in free}


def test_shift_renames_inner_binder_on_clash():
    v = PairV(DestV(1), AmparV(frozenset({2}), HoleV(2), PairV(DestV(2), DestV(1))))
    w = shift_value(v, frozenset({1}), 1)
    assert value_names(w) == {2}
    inner = w.right
    assert 2 not in inner.names and value_names(inner) == {2}


def test_equirecursive_equality():
    nat = TRec("N", TSum(UNIT, TRecVar("N")))
    once = TSum(UNIT, nat)
    assert type_eq(nat, once)
    assert type_eq(unfold(nat), once)
    assert not type_eq(nat, TSum(UNIT, UNIT))
    nat2 = TRec("M", TSum(UNIT, TSum(UNIT, TRecVar("M"))))
    assert type_eq(nat, nat2)


@given(data_values)
def test_pretty_values_are_literals(v):
    assert parse_value(pretty_value(v)) == v


@pytest.mark.parametrize("v,text", [
    (UnitV(), "()"),
    (InlV(UnitV()), "Inl ()"),
    (ModV(ONE_INF, PairV(UnitV(), HoleV(3))), "Mod{1inf} ((), []3)"),
    (AmparV(frozenset({1, 2}), PairV(HoleV(1), HoleV(2)), PairV(DestV(1), DestV(2))),
     "{1,2}<([]1, []2) & (->1, ->2)>"),
    (FunV("x", ONE_NU, Var("x")), "lam x{1v} -> x"),
])
def test_pretty_value(v, text):
    assert pretty_value(v) == text
