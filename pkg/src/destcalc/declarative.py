"""A declarative oracle for term typing: top-down proof search.

Types are synthesised structurally (every construct in scope is annotated
enough for that). The search is over the mode part: each rule with a
context sum `s·G1 + G2` enumerates every way of splitting each binding's
mode, drawing summands from a bounded universe of modes. Leaves weaken
only multiplicity-w bindings and coerce only upwards from 1v.

Only core terms whose values carry no holes are supported; fixed points
and open ampars raise `Unsupported`.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from .contexts import Ctx, DestKey, VarKey
from .modes import ONE_INF, ONE_NU, ONE_UP, Mode, all_modes
from .syntax import (
    UNIT, App, AmparV, CaseExp, CaseProd, CaseSum, DestV, FillComp, FillExp,
    FillFun, FillInl, FillInr, FillLeaf, FillProd, FillUnit, Fix, From, FunV,
    HoleV, InlV, InrV, ModV, New, OpenT, PairV, Seq, TAmpar, TArrow, TDest,
    TExp, To, TProd, TRec, TSum, Type, UnitV, Upd, Val, Var, binders, children,
    type_eq, unfold,
)

OK = "ok"
REJECT = "reject"
BUDGET = "budget_exhausted"

class Unsupported(Exception):
    pass


class _Reject(Exception):
    pass


class _Budget(Exception):
    pass


# ---------------------------------------------------------------- types


def _shape(t, cls):
    t = unfold(t) if isinstance(t, TRec) else t
    if not isinstance(t, cls):
        raise _Reject
    return t


def _eq(a, b):
    if not type_eq(a, b):
        raise _Reject


@lru_cache(maxsize=None)
def universe(max_age: int) -> tuple[Mode, ...]:
    return tuple(all_modes(max_age))


@lru_cache(maxsize=None)
def _splits(target: Mode, s: Mode, max_age: int) -> tuple:
    """Every (a, b), each a mode or None for absent, with s·a + b = target."""
    out = []
    for a in universe(max_age):
        if s * a == target:
            out.append((a, None))
        for b in universe(max_age):
            if s * a + b == target:
                out.append((a, b))
    if target in universe(max_age):
        out.append((None, target))
    return tuple(out)


# ---------------------------------------------------------------- search


class Search:
    def __init__(self, tenv: dict, budget: int, max_age: int):
        self.tenv = tenv          # key -> type, for every key in scope
        self.budget = budget
        self.max_age = max_age
        self.memo: dict = {}
        self.fv: dict = {}

    def tick(self):
        self.budget -= 1
        if self.budget < 0:
            raise _Budget

    # ---- synthesis

    def synth(self, t, tenv):
        match t:
            case Var(x):
                k = VarKey(x)
                if k not in tenv:
                    raise _Reject
                return tenv[k]
            case Val(v):
                return self.vsynth(v, tenv)
            case New(ann):
                if ann is None:
                    raise Unsupported("new without an annotation")
                return TAmpar(ann, TDest(ONE_NU, ann))
            case App(f, a):
                ft = _shape(self.synth(f, tenv), TArrow)
                _eq(self.synth(a, tenv), ft.arg)
                return ft.res
            case Seq(a, b):
                _eq(self.synth(a, tenv), UNIT)
                return self.synth(b, tenv)
            case CaseSum(m, s, x1, u1, x2, u2):
                st = _shape(self.synth(s, tenv), TSum)
                r1 = self.synth(u1, {**tenv, VarKey(x1): st.left})
                _eq(self.synth(u2, {**tenv, VarKey(x2): st.right}), r1)
                return r1
            case CaseProd(m, s, x1, x2, u):
                st = _shape(self.synth(s, tenv), TProd)
                return self.synth(u, {**tenv, VarKey(x1): st.left, VarKey(x2): st.right})
            case CaseExp(m, n, s, x, u):
                st = _shape(self.synth(s, tenv), TExp)
                if st.mode != n:
                    raise _Reject
                return self.synth(u, {**tenv, VarKey(x): st.body})
            case Upd(s, x, u):
                st = _shape(self.synth(s, tenv), TAmpar)
                return TAmpar(st.left, self.synth(u, {**tenv, VarKey(x): st.right}))
            case To(a):
                return TAmpar(self.synth(a, tenv), UNIT)
            case From(a):
                st = _shape(self.synth(a, tenv), TAmpar)
                r = _shape(st.right, TExp)
                if r.mode != ONE_INF:
                    raise _Reject
                return TProd(st.left, r)
            case FillUnit(d):
                _eq(self._dest(d, tenv).body, UNIT)
                return UNIT
            case FillInl(d) | FillInr(d):
                dt = self._dest(d, tenv)
                s = _shape(dt.body, TSum)
                return TDest(dt.mode, s.left if isinstance(t, FillInl) else s.right)
            case FillProd(d):
                dt = self._dest(d, tenv)
                s = _shape(dt.body, TProd)
                return TProd(TDest(dt.mode, s.left), TDest(dt.mode, s.right))
            case FillExp(m, d):
                dt = self._dest(d, tenv)
                s = _shape(dt.body, TExp)
                if s.mode != m:
                    raise _Reject
                return TDest(m * dt.mode, s.body)
            case FillFun(d, x, m, u):
                dt = self._dest(d, tenv)
                ft = _shape(dt.body, TArrow)
                if ft.mode != m:
                    raise _Reject
                _eq(self.synth(u, {**tenv, VarKey(x): ft.arg}), ft.res)
                return UNIT
            case FillComp(d, a):
                dt = self._dest(d, tenv)
                if dt.mode != ONE_NU:
                    raise _Reject
                at = _shape(self.synth(a, tenv), TAmpar)
                _eq(at.left, dt.body)
                return at.right
            case FillLeaf(d, a):
                dt = self._dest(d, tenv)
                _eq(self.synth(a, tenv), dt.body)
                return UNIT
            case Fix() | OpenT():
                raise Unsupported(type(t).__name__)
        raise Unsupported(f"not a core term: {type(t).__name__}")

    def _dest(self, d, tenv):
        return _shape(self.synth(d, tenv), TDest)

    def vsynth(self, v, tenv):
        match v:
            case UnitV():
                return UNIT
            case DestV(h):
                if DestKey(h) not in tenv:
                    raise _Reject
                return tenv[DestKey(h)]
            case ModV(m, a):
                return TExp(m, self.vsynth(a, tenv))
            case PairV(a, b):
                return TProd(self.vsynth(a, tenv), self.vsynth(b, tenv))
            case InlV() | InrV() | FunV():
                raise Unsupported("value needs a type annotation")
            case HoleV() | AmparV():
                raise Unsupported("values with holes")
        raise Unsupported(repr(v))

    # ---- modes

    def free(self, t) -> frozenset:
        hit = self.fv.get(id(t))
        if hit is None:
            hit = self.fv[id(t)] = (t, frozenset(_free_keys(t)))
        return hit[1]

    def holds(self, t, tenv, g: dict) -> bool:
        """g |- t, the type already being known to match."""
        # a binding t does not mention can only be weakened away
        fv = self.free(t)
        if any(k not in fv and not m.many for k, m in g.items()):
            return False
        g = {k: m for k, m in g.items() if k in fv}
        key = (id(t), frozenset(tenv.items()), frozenset(g.items()))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.tick()
        try:
            out = self._holds(t, tenv, g)
        except _Reject:
            out = False
        self.memo[key] = out
        return out

    def _leaf(self, g: dict, used=None) -> bool:
        for k, m in g.items():
            if k == used:
                if not ONE_NU <= m:
                    return False
            elif not m.many:
                return False
        return used is None or used in g

    def _split(self, g: dict, s: Mode):
        """Every (g1, g2) with s·g1 + g2 = g."""
        keys = list(g)
        options = [_splits(g[k], s, self.max_age) for k in keys]
        for choice in product(*options):
            g1 = {k: a for k, (a, _) in zip(keys, choice) if a is not None}
            g2 = {k: b for k, (_, b) in zip(keys, choice) if b is not None}
            yield g1, g2

    def _two(self, g, s, left, right) -> bool:
        for g1, g2 in self._split(g, s):
            if left(g1) and right(g2):
                return True
        return False

    def _bind(self, tenv, g, binds: dict, body) -> bool:
        """g, binds |- body, renaming binders that shadow something in scope."""
        env2 = dict(tenv)
        g2 = dict(g)
        for x, (m, ty) in binds.items():
            k = VarKey(x)
            if k in tenv:
                raise Unsupported("shadowed binder")
            env2[k] = ty
            g2[k] = m
        return self.holds(body, env2, g2)

    def _holds(self, t, tenv, g) -> bool:
        match t:
            case Var(x):
                return self._leaf(g, VarKey(x))
            case New():
                return self._leaf(g)
            case Val(v):
                return self._value_term(v, tenv, g)
            case App(f, a):
                ft = _shape(self.synth(f, tenv), TArrow)
                return self._two(g, ft.mode, lambda g1: self.holds(a, tenv, g1), lambda g2: self.holds(f, tenv, g2))
            case Seq(a, b):
                return self._two(g, ONE_NU, lambda g1: self.holds(a, tenv, g1), lambda g2: self.holds(b, tenv, g2))
            case CaseSum(m, s, x1, u1, x2, u2):
                st = _shape(self.synth(s, tenv), TSum)
                return self._two(
                    g, m, lambda g1: self.holds(s, tenv, g1),
                    lambda g2: self._bind(tenv, g2, {x1: (m, st.left)}, u1)
                    and self._bind(tenv, g2, {x2: (m, st.right)}, u2))
            case CaseProd(m, s, x1, x2, u):
                st = _shape(self.synth(s, tenv), TProd)
                if x1 == x2:
                    raise Unsupported("repeated binder")
                return self._two(
                    g, m, lambda g1: self.holds(s, tenv, g1),
                    lambda g2: self._bind(tenv, g2, {x1: (m, st.left), x2: (m, st.right)}, u))
            case CaseExp(m, n, s, x, u):
                st = _shape(self.synth(s, tenv), TExp)
                return self._two(
                    g, m, lambda g1: self.holds(s, tenv, g1),
                    lambda g2: self._bind(tenv, g2, {x: (m * n, st.body)}, u))
            case Upd(s, x, u):
                st = _shape(self.synth(s, tenv), TAmpar)
                return self._two(
                    g, ONE_NU, lambda g1: self.holds(s, tenv, g1),
                    lambda g2: self._bind(tenv, {k: ONE_UP * m for k, m in g2.items()}, {x: (ONE_NU, st.right)}, u))
            case To(a) | From(a) | FillUnit(a) | FillInl(a) | FillInr(a) | FillProd(a) | FillExp(_, a):
                return self.holds(a, tenv, g)
            case FillFun(d, x, m, u):
                dt = self._dest(d, tenv)
                ft = _shape(dt.body, TArrow)
                s = ONE_UP * dt.mode
                return self._two(
                    g, s, lambda g2: self._bind(tenv, g2, {x: (m, ft.arg)}, u),
                    lambda g1: self.holds(d, tenv, g1))
            case FillComp(d, a):
                return self._two(g, ONE_UP, lambda g2: self.holds(a, tenv, g2), lambda g1: self.holds(d, tenv, g1))
            case FillLeaf(d, a):
                s = ONE_UP * self._dest(d, tenv).mode
                return self._two(g, s, lambda g2: self.holds(a, tenv, g2), lambda g1: self.holds(d, tenv, g1))
        raise Unsupported(type(t).__name__)

    def _value_term(self, v, tenv, g) -> bool:
        """Γ, Δ |- v: Γ disposable, Δ ||- v with destination bindings only."""
        keys = [k for k in g if isinstance(k, DestKey)]
        for k in g:
            if not isinstance(k, DestKey) and not g[k].many:
                return False
        for pick in product((False, True), repeat=len(keys)):
            delta = {k: g[k] for k, p in zip(keys, pick) if p}
            if all(g[k].many for k, p in zip(keys, pick) if not p) and self._value(v, tenv, delta):
                return True
        return False

    def _value(self, v, tenv, d) -> bool:
        self.tick()
        match v:
            case UnitV():
                return not d
            case DestV(h):
                return set(d) == {DestKey(h)} and ONE_NU <= d[DestKey(h)]
            case ModV(m, a):
                return any(not g2 and self._value(a, tenv, g1) for g1, g2 in self._split(d, m))
            case PairV(a, b):
                return self._two(d, ONE_NU, lambda g1: self._value(a, tenv, g1), lambda g2: self._value(b, tenv, g2))
        raise Unsupported(repr(v))


def _free_keys(t) -> set:
    match t:
        case Var(x):
            return {VarKey(x)}
        case Val(v):
            return {DestKey(h) for h in _value_dests(v)}
    out = set()
    for c, bs in zip(children(t), binders(t)):
        out |= _free_keys(c) - {VarKey(x) for x in bs}
    return out


def _value_dests(v) -> set:
    match v:
        case DestV(h):
            return {h}
        case InlV(a) | InrV(a) | ModV(_, a):
            return _value_dests(a)
        case PairV(a, b):
            return _value_dests(a) | _value_dests(b)
    return set()


# ---------------------------------------------------------------- entry point


def _max_age(g: Ctx, t) -> int:
    ages = [b.mode.age for _, b in g.items() if b.mode.age is not None]
    return max(ages, default=0) + _depth(t) + 1


def _depth(t) -> int:
    inner = max((_depth(c) for c in children(t)), default=0)
    return inner + (1 if isinstance(t, (Upd, FillLeaf, FillComp, FillFun)) else 0)


def check_term_declarative(g: Ctx, t, expected: Type, budget: int = 200_000) -> str:
    """OK, REJECT or BUDGET for g |- t : expected, by exhaustive search."""
    tenv, modes = {}, {}
    for k, b in g.items():
        if not isinstance(k, (VarKey, DestKey)):
            raise Unsupported("hole bindings in a term context")
        tenv[k] = b.ty
        modes[k] = b.mode
    s = Search(tenv, budget, _max_age(g, t))
    try:
        ty = s.synth(t, tenv)
        if expected is not None and not type_eq(ty, expected):
            return REJECT
        return OK if s.holds(t, tenv, modes) else REJECT
    except _Reject:
        return REJECT
    except _Budget:
        return BUDGET


__all__ = ["check_term_declarative", "OK", "REJECT", "BUDGET", "Unsupported", "universe"]
