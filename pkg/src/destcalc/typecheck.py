"""Algorithmic typechecking for terms, values, evaluation contexts and commands.

Checking runs in two phases. The first walks the term, inferring types by
unification (runtime values such as `lam` bodies and holes carry no
annotations, so types must flow in from the surroundings). It returns a
deferred usage computation for every node. The second phase, once all types
are known, evaluates those computations into per-key usage sets and checks
each binder's obligation: the declared mode must be one the body can produce.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .contexts import EMPTY, Binding, Ctx, DestKey, HoleKey, VarKey, render_key
from .modes import MANY_INF, ONE_INF, ONE_NU, ONE_UP, Mode, all_modes
from .syntax import (
    UNIT, AmparV, App, CaseExp, CaseProd, CaseSum, DestV, FillComp, FillExp,
    FillFun, FillInl, FillInr, FillLeaf, FillProd, FillUnit, Fix, From, FunV,
    HoleV, InlV, InrV, ModV, New, OpenAmpar, OpenT, PairV, Seq, TAmpar, TArrow,
    TDest, TExp, To, TProd, TRec, TRecVar, TSum, TUnit, TVar, Type, UnitV, Upd,
    Val, Var, binders, children, plug, plug_all, pretty_type, term_names, value_names, component_names, type_vars,
    unfold,
)
from .usage import ABSENT, EMPTY_TERM, EMPTY_VALUE, OCCURRENCE, UMap, Usage, exact, leaf

RULES = {
    Var: "TY-TERM-VAR", App: "TY-TERM-APP", Seq: "TY-TERM-PATU",
    CaseSum: "TY-TERM-PATS", CaseProd: "TY-TERM-PATP", CaseExp: "TY-TERM-PATE",
    Upd: "TY-TERM-UPDA", To: "TY-TERM-TOA", From: "TY-TERM-FROMA",
    New: "TY-TERM-NEWA", FillUnit: "TY-TERM-FILLU", FillInl: "TY-TERM-FILLL",
    FillInr: "TY-TERM-FILLR", FillProd: "TY-TERM-FILLP", FillExp: "TY-TERM-FILLE",
    FillFun: "TY-TERM-FILLF", FillComp: "TY-TERM-FILLCOMP",
    FillLeaf: "TY-TERM-FILLLEAF", Val: "TY-TERM-VAL", Fix: "TY-TERM-FIX",
    OpenT: "TY-ECTXS-OPENAMPAR",
}


class TypeCheckError(Exception):
    def __init__(self, rule: str, path, message: str, key=None):
        self.rule = rule
        self.path = "/".join(str(p) for p in path) or "."
        self.message = message
        self.key = key
        super().__init__(f"{rule} at {self.path}: {message}")


# ---------------------------------------------------------------- metavariables

_ids = itertools.count(1)


class Meta:
    """A type unknown, solved by unification."""

    __slots__ = ("ref", "id")

    def __init__(self):
        self.ref = None
        self.id = next(_ids)

    def __str__(self):
        return f"?{self.id}"

    __repr__ = __str__


class MMode:
    """A mode unknown (only ever the inner mode of a destination type)."""

    __slots__ = ("ref", "id")

    def __init__(self):
        self.ref = None
        self.id = next(_ids)

    def __str__(self):
        return f"?m{self.id}"

    __repr__ = __str__


def resolve(t):
    if not isinstance(t, (Meta, MMode)) or t.ref is None:
        return t
    r = t.ref
    while isinstance(r, (Meta, MMode)) and r.ref is not None:
        r = r.ref
    t.ref = r   # path compression
    return r


def mode_of(m) -> Mode:
    """Final value of a mode; unconstrained unknowns default to 1v."""
    m = resolve(m)
    return ONE_NU if isinstance(m, MMode) else m


def zonk(t):
    t = resolve(t)
    match t:
        case TSum(a, b):
            return TSum(zonk(a), zonk(b))
        case TProd(a, b):
            return TProd(zonk(a), zonk(b))
        case TAmpar(a, b):
            return TAmpar(zonk(a), zonk(b))
        case TExp(m, a):
            return TExp(resolve(m), zonk(a))
        case TDest(m, a):
            return TDest(resolve(m), zonk(a))
        case TArrow(a, m, b):
            return TArrow(zonk(a), resolve(m), zonk(b))
        case TRec(n, a):
            return TRec(n, zonk(a))
    return t


def close_type(t) -> Type:
    """Zonk, naming leftover unknowns `_1`, `_2`, ... by first occurrence."""
    names: dict = {}

    def go(t):
        t = resolve(t)
        match t:
            case Meta():
                if t.id not in names:
                    names[t.id] = TVar(f"_{len(names) + 1}")
                return names[t.id]
            case MMode():
                return ONE_NU
            case TSum(a, b):
                return TSum(go(a), go(b))
            case TProd(a, b):
                return TProd(go(a), go(b))
            case TAmpar(a, b):
                return TAmpar(go(a), go(b))
            case TExp(m, a):
                return TExp(mode_of(m), go(a))
            case TDest(m, a):
                return TDest(mode_of(m), go(a))
            case TArrow(a, m, b):
                return TArrow(go(a), mode_of(m), go(b))
            case TRec(n, a):
                return TRec(n, go(a))
        return t

    return go(t)


def instantiate(t: Type) -> Type:
    from .syntax import type_subst

    vs = type_vars(t)
    return type_subst(t, {v: Meta() for v in vs}) if vs else t


class Mismatch(Exception):
    pass


def _occurs(m: Meta, t) -> bool:
    t = resolve(t)
    if t is m:
        return True
    match t:
        case TSum(a, b) | TProd(a, b) | TAmpar(a, b) | TArrow(a, _, b):
            return _occurs(m, a) or _occurs(m, b)
        case TExp(_, a) | TDest(_, a) | TRec(_, a):
            return _occurs(m, a)
    return False


def unify_mode(a, b):
    a, b = resolve(a), resolve(b)
    if a is b or a == b:
        return
    if isinstance(a, MMode):
        a.ref = b
    elif isinstance(b, MMode):
        b.ref = a
    else:
        raise Mismatch(f"mode {a} does not match {b}")


def unify(a, b):
    seen: set = set()

    def go(a, b):
        a, b = resolve(a), resolve(b)
        if a is b:
            return
        if isinstance(a, Meta) or isinstance(b, Meta):
            m, t = (a, b) if isinstance(a, Meta) else (b, a)
            if _occurs(m, t):
                raise Mismatch(f"cyclic type {m} ~ {pretty_type(zonk(t))}")
            m.ref = t
            return
        if isinstance(a, TRec) or isinstance(b, TRec):
            key = (id(a), id(b))
            if key in seen:
                return
            seen.add(key)
            keep.append((a, b))
            go(unfold(a), unfold(b))
            return
        match a, b:
            case TUnit(), TUnit():
                return
            case (TSum(a1, a2), TSum(b1, b2)) | (TProd(a1, a2), TProd(b1, b2)) | (TAmpar(a1, a2), TAmpar(b1, b2)):
                go(a1, b1)
                go(a2, b2)
                return
            case (TExp(m, a1), TExp(n, b1)) | (TDest(m, a1), TDest(n, b1)):
                unify_mode(m, n)
                go(a1, b1)
                return
            case TArrow(a1, m, a2), TArrow(b1, n, b2):
                unify_mode(m, n)
                go(a1, b1)
                go(a2, b2)
                return
            case TVar(x), TVar(y) if x == y:
                return
            case TRecVar(x), TRecVar(y) if x == y:
                return
        raise Mismatch(f"expected {pretty_type(zonk(b))}, found {pretty_type(zonk(a))}")

    keep: list = []  # keeps unfolded pairs alive so their ids stay unique
    go(a, b)


# ---------------------------------------------------------------- environments


@dataclass(frozen=True)
class Env:
    vars: dict = field(default_factory=dict)   # name -> (Mode, type)
    dests: dict = field(default_factory=dict)  # hole name -> TDest type

    def bind(self, **kw) -> Env:
        v = dict(self.vars)
        v.update(kw)
        return Env(v, self.dests)

    def bind_vars(self, pairs) -> Env:
        v = dict(self.vars)
        v.update(pairs)
        return Env(v, self.dests)

    def bind_dests(self, pairs) -> Env:
        d = dict(self.dests)
        d.update(pairs)
        return Env(self.vars, d)


@dataclass(frozen=True)
class _Focus:
    """Placeholder for the term under focus when typing a bare context."""

    ty: Type


_fix_ok: dict = {}


class Checker:
    def __init__(self):
        self.probe = None       # (key, Usage) while searching for a context
        self.failures = None    # collected obligation failures while probing
        self.focus_type = None
        self.focus_dests = None
        self.watch = None       # a subterm whose expected type is recorded
        self.uncached = ()      # ids of nodes never answered from the scheme cache
        self.watched = None

    # ---- failures

    def fail(self, rule, path, msg, key=None):
        if self.failures is not None:
            self.failures.append(key)
            return
        raise TypeCheckError(rule, path, msg, key)

    def mismatch(self, rule, path, a, b):
        try:
            unify(a, b)
        except Mismatch as e:
            raise TypeCheckError(rule, path, str(e)) from None

    def oblige(self, rule, path, u: Usage, key, mode: Mode):
        if mode in u:
            return
        name = render_key(key)
        if not u.modes and u.tail is None:
            msg = f"no use of {name} here is allowed"
        elif u.absent and (u.tail is not None) and not (u.modes - {MANY_INF}):
            msg = f"{name} :{mode} is unused and not weakenable (multiplicity 1)"
        else:
            msg = f"{name} is declared at mode {mode} but its uses give {u.describe()}"
        self.fail(rule, path, msg, key)

    # ---- shape expectations

    def _shape(self, rule, path, ty, make, cls, what):
        ty = resolve(ty)
        if isinstance(ty, TRec):
            ty = unfold(ty)
        if isinstance(ty, Meta):
            new = make()
            ty.ref = new
            return new
        if not isinstance(ty, cls):
            raise TypeCheckError(rule, path, f"expected {what}, found {pretty_type(zonk(ty))}")
        return ty

    def sum_of(self, rule, path, ty):
        t = self._shape(rule, path, ty, lambda: TSum(Meta(), Meta()), TSum, "a sum type")
        return t.left, t.right

    def prod_of(self, rule, path, ty):
        t = self._shape(rule, path, ty, lambda: TProd(Meta(), Meta()), TProd, "a product type")
        return t.left, t.right

    def ampar_of(self, rule, path, ty):
        t = self._shape(rule, path, ty, lambda: TAmpar(Meta(), Meta()), TAmpar, "an ampar type")
        return t.left, t.right

    def dest_of(self, rule, path, ty):
        t = self._shape(rule, path, ty, lambda: TDest(MMode(), Meta()), TDest, "a destination type")
        return t.mode, t.body

    def arrow_of(self, rule, path, ty):
        t = self._shape(rule, path, ty, lambda: TArrow(Meta(), MMode(), Meta()), TArrow, "a function type")
        return t.arg, t.mode, t.res

    def exp_of(self, rule, path, ty, n):
        t = self._shape(rule, path, ty, lambda: TExp(n, Meta()), TExp, f"!{{{n}}} T")
        try:
            unify_mode(t.mode, n)
        except Mismatch as e:
            raise TypeCheckError(rule, path, str(e)) from None
        return t.body

    # ---- terms

    def term(self, t, exp, env: Env, path=()):
        """Phase one for a term: unify types, return its deferred usage map."""
        rule = RULES.get(type(t), "TY-TERM")
        p = path
        if t is self.watch:
            self.watched = exp
        if id(t) not in self.uncached and not isinstance(t, (Var, New, Val, _Focus)):
            hit = _closed_term(t)
            if hit is not None:
                self.mismatch(rule, p, instantiate(hit[0]), exp)
                return lambda: hit[1]
        match t:
            case Var(x):
                if x not in env.vars:
                    raise TypeCheckError(rule, p, f"unknown variable {x}")
                self.mismatch(rule, p, env.vars[x][1], exp)
                return lambda: leaf(VarKey(x))

            case App(f, a):
                fty = Meta()
                uf = self.term(f, fty, env, p + (0,))
                arg, m, res = self.arrow_of(rule, p + (0,), fty)
                self.mismatch(rule, p, res, exp)
                ua = self.term(a, arg, env, p + (1,))
                return lambda: ua().scale(mode_of(m)) + uf()

            case Seq(a, b):
                ua = self.term(a, UNIT, env, p + (0,))
                ub = self.term(b, exp, env, p + (1,))
                return lambda: ua() + ub()

            case CaseSum(m, s, x1, u1, x2, u2):
                sty = Meta()
                us = self.term(s, sty, env, p + (0,))
                l, r = self.sum_of(rule, p + (0,), sty)
                k1 = self.term(u1, exp, env.bind_vars({x1: (m, l)}), p + (1,))
                k2 = self.term(u2, exp, env.bind_vars({x2: (m, r)}), p + (2,))

                def usage():
                    b1, b2 = k1(), k2()
                    self.oblige(rule, p + (1,), b1.get(VarKey(x1)), VarKey(x1), m)
                    self.oblige(rule, p + (2,), b2.get(VarKey(x2)), VarKey(x2), m)
                    shared = b1.without(VarKey(x1)).meet(b2.without(VarKey(x2)))
                    return us().scale(m) + shared
                return usage

            case CaseProd(m, s, x1, x2, u):
                sty = Meta()
                us = self.term(s, sty, env, p + (0,))
                l, r = self.prod_of(rule, p + (0,), sty)
                k = self.term(u, exp, env.bind_vars({x1: (m, l), x2: (m, r)}), p + (1,))

                def usage():
                    b = k()
                    for x in (x1, x2) if x1 != x2 else (x2,):
                        self.oblige(rule, p + (1,), b.get(VarKey(x)), VarKey(x), m)
                    return us().scale(m) + b.without(VarKey(x1), VarKey(x2))
                return usage

            case CaseExp(m, n, s, x, u):
                sty = Meta()
                us = self.term(s, sty, env, p + (0,))
                inner = self.exp_of(rule, p + (0,), sty, n)
                k = self.term(u, exp, env.bind_vars({x: (m * n, inner)}), p + (1,))

                def usage():
                    b = k()
                    self.oblige(rule, p + (1,), b.get(VarKey(x)), VarKey(x), m * n)
                    return us().scale(m) + b.without(VarKey(x))
                return usage

            case Upd(s, x, body):
                sty = Meta()
                us = self.term(s, sty, env, p + (0,))
                left, right = self.ampar_of(rule, p + (0,), sty)
                out = Meta()
                self.mismatch(rule, p, TAmpar(left, out), exp)
                k = self.term(body, out, env.bind_vars({x: (ONE_NU, right)}), p + (1,))

                def usage():
                    b = k()
                    self.oblige(rule, p + (1,), b.get(VarKey(x)), VarKey(x), ONE_NU)
                    return us() + b.without(VarKey(x)).pre_up()
                return usage

            case To(a):
                aty = Meta()
                self.mismatch(rule, p, TAmpar(aty, UNIT), exp)
                return self.term(a, aty, env, p + (0,))

            case From(a):
                aty = Meta()
                ua = self.term(a, aty, env, p + (0,))
                left, right = self.ampar_of(rule, p + (0,), aty)
                inner = Meta()
                try:
                    unify(right, TExp(ONE_INF, inner))
                except Mismatch:
                    raise TypeCheckError(
                        rule, p, "operand must have shape U >< !{1inf} T, found "
                        + pretty_type(zonk(TAmpar(left, right)))) from None
                self.mismatch(rule, p, TProd(left, TExp(ONE_INF, inner)), exp)
                return ua

            case New(ann):
                ty = instantiate(ann) if ann is not None else Meta()
                self.mismatch(rule, p, TAmpar(ty, TDest(ONE_NU, ty)), exp)
                return lambda: EMPTY_TERM

            case FillUnit(d):
                n, body, ud = self._dest_operand(rule, d, env, p)
                self.mismatch(rule, p, body, UNIT)
                self.mismatch(rule, p, UNIT, exp)
                return ud

            case FillInl(d) | FillInr(d):
                n, body, ud = self._dest_operand(rule, d, env, p)
                l, r = self.sum_of(rule, p + (0,), body)
                self.mismatch(rule, p, TDest(n, l if isinstance(t, FillInl) else r), exp)
                return ud

            case FillProd(d):
                n, body, ud = self._dest_operand(rule, d, env, p)
                l, r = self.prod_of(rule, p + (0,), body)
                self.mismatch(rule, p, TProd(TDest(n, l), TDest(n, r)), exp)
                return ud

            case FillExp(m, d):
                n, body, ud = self._dest_operand(rule, d, env, p)
                inner = self.exp_of(rule, p + (0,), body, m)
                n = resolve(n)
                if isinstance(n, MMode):
                    raise TypeCheckError(rule, p, "destination mode is not determined here")
                self.mismatch(rule, p, TDest(m * n, inner), exp)
                return ud

            case FillFun(d, x, m, body):
                n, fty, ud = self._dest_operand(rule, d, env, p)
                arg, mm, res = self.arrow_of(rule, p + (0,), fty)
                try:
                    unify_mode(mm, m)
                except Mismatch as e:
                    raise TypeCheckError(rule, p, str(e)) from None
                self.mismatch(rule, p, UNIT, exp)
                k = self.term(body, res, env.bind_vars({x: (m, arg)}), p + (1,))

                def usage():
                    b = k()
                    self.oblige(rule, p + (1,), b.get(VarKey(x)), VarKey(x), m)
                    return ud() + b.without(VarKey(x)).scale(ONE_UP * mode_of(n))
                return usage

            case FillComp(d, a):
                n, body, ud = self._dest_operand(rule, d, env, p)
                try:
                    unify_mode(n, ONE_NU)
                except Mismatch:
                    raise TypeCheckError(rule, p, f"destination must have mode 1v, found {resolve(n)}") from None
                ua = self.term(a, TAmpar(body, exp), env, p + (1,))
                return lambda: ud() + ua().scale(ONE_UP)

            case FillLeaf(d, a):
                n, body, ud = self._dest_operand(rule, d, env, p)
                ua = self.term(a, body, env, p + (1,))
                self.mismatch(rule, p, UNIT, exp)
                return lambda: ud() + ua().scale(ONE_UP * mode_of(n))

            case Val(v):
                uv = self.value(v, exp, env, None, p)

                def usage():
                    u = uv()
                    for k in u.keys:
                        if isinstance(k, HoleKey):
                            self.fail(rule, p, f"hole {render_key(k)} in a term", k)
                    return u.weaken()
                return usage

            case Fix(x, ty, body):
                self._check_fix(t, p)
                self.mismatch(rule, p, instantiate(ty), exp)
                return lambda: EMPTY_TERM

            case OpenT(hs, left, body):
                return self._ampar(rule, p, hs, left, body, exp, env, term_body=True)

            case _Focus(ty):
                self.focus_type = ty
                self.focus_dests = dict(env.dests)
                self.mismatch("TY-CMD", p, ty, exp)

                def usage():
                    if self.probe is None:
                        return EMPTY_TERM
                    key, u = self.probe
                    return UMap({key: u}, ABSENT)
                return usage

        raise TypeCheckError("TY-TERM", p, f"not a core term: {type(t).__name__}")

    def _dest_operand(self, rule, d, env, p):
        dty = Meta()
        ud = self.term(d, dty, env, p + (0,))
        n, body = self.dest_of(rule, p + (0,), dty)
        return n, body, ud

    def _check_fix(self, t: Fix, p):
        done = _fix_ok.get(id(t))
        if done is not None and done[0] is t:
            return
        sub = Checker()
        env = Env({t.var: (MANY_INF, t.ty)}, {})
        k = sub.term(t.body, t.ty, env, p + (0,))
        u = k()
        sub.oblige("TY-TERM-FIX", p, u.get(VarKey(t.var)), VarKey(t.var), MANY_INF)
        for key in u.keys:
            if key != VarKey(t.var) and None not in u.get(key):
                raise TypeCheckError("TY-TERM-FIX", p, f"recursive definition is not closed: {render_key(key)}")
        _fix_ok[id(t)] = (t,)

    def _term_uncached(self, t, ty):
        return self.term(t, ty, Env(), ())()

    # ---- ampars (closed values and open components share one rule)

    def _ampar(self, rule, p, hs, left, right, exp, env, term_body: bool):
        lty, rty = Meta(), Meta()
        self.mismatch(rule, p, TAmpar(lty, rty), exp)
        sink: dict = {}
        ul = self.value(left, lty, env, sink, p + ("L",), ONE_NU)
        for h in sorted(sink):
            if h not in hs:
                raise TypeCheckError(rule, p, f"hole []{h} is not bound by the ampar")
        dests = {}
        for h in sorted(hs):
            if h not in sink:
                raise TypeCheckError(rule, p, f"binder {h} has no hole []{h} on the left")
            hty, hmode = sink[h]
            dests[h] = TDest(hmode, hty)
        inner = env.bind_dests(dests)
        if term_body:
            ur = self.term(right, rty, Env({}, inner.dests), p + (0,))
        else:
            ur = self.value(right, rty, inner, None, p + ("R",))

        def usage():
            a = ul()
            b = ur()
            for h in sorted(hs):
                hk = HoleKey(h)
                if a.get(hk) != exact(dests[h].mode):
                    self.fail(rule, p, f"hole []{h} must occur at mode {dests[h].mode}", hk)
                self.oblige(rule, p, b.get(DestKey(h)), DestKey(h), ONE_NU)
            bound = [HoleKey(h) for h in hs] + [DestKey(h) for h in hs]
            return a.without(*bound) + b.without(*bound).pre_up()
        return usage

    # ---- values

    def value(self, v, exp, env: Env, sink, path, scale: Mode = ONE_NU):
        """Phase one for a value. `sink` collects hole types and modes."""
        p = path
        match v:
            case UnitV():
                self.mismatch("TY-VAL-UNIT", p, UNIT, exp)
                return lambda: EMPTY_VALUE
            case HoleV(h):
                if sink is None:
                    raise TypeCheckError("TY-VAL-HOLE", p, f"hole []{h} outside the left side of an ampar")
                if h in sink:
                    self.mismatch("TY-VAL-HOLE", p, sink[h][0], exp)
                    sink[h] = (sink[h][0], sink[h][1] + scale)
                else:
                    sink[h] = (exp, scale)
                return lambda: UMap({HoleKey(h): exact(ONE_NU)}, ABSENT)
            case DestV(h):
                if h not in env.dests:
                    raise TypeCheckError("TY-VAL-DEST", p, f"unbound destination ->{h}")
                self.mismatch("TY-VAL-DEST", p, env.dests[h], exp)
                return lambda: UMap({DestKey(h): OCCURRENCE}, ABSENT)
            case InlV(a) | InrV(a):
                l, r = self.sum_of("TY-VAL-LEFT" if isinstance(v, InlV) else "TY-VAL-RIGHT", p, exp)
                return self.value(a, l if isinstance(v, InlV) else r, env, sink, p + (0,), scale)
            case PairV(a, b):
                l, r = self.prod_of("TY-VAL-PROD", p, exp)
                ua = self.value(a, l, env, sink, p + (0,), scale)
                ub = self.value(b, r, env, sink, p + (1,), scale)
                return lambda: ua() + ub()
            case ModV(m, a):
                inner = self.exp_of("TY-VAL-EXP", p, exp, m)
                ua = self.value(a, inner, env, sink, p + (0,), scale * m)
                return lambda: ua().scale(m)
            case FunV(x, m, body):
                scheme = _closed_scheme(v)
                if scheme is not None:
                    self.mismatch("TY-VAL-FUN", p, instantiate(scheme), exp)
                    return lambda: EMPTY_VALUE
                arg, mm, res = self.arrow_of("TY-VAL-FUN", p, exp)
                try:
                    unify_mode(mm, m)
                except Mismatch as e:
                    raise TypeCheckError("TY-VAL-FUN", p, str(e)) from None
                k = self.term(body, res, Env({x: (m, arg)}, env.dests), p + (0,))

                def usage():
                    b = k()
                    self.oblige("TY-VAL-FUN", p, b.get(VarKey(x)), VarKey(x), m)
                    return b.without(VarKey(x))
                return usage
            case AmparV(hs, l, r):
                return self._ampar("TY-VAL-AMPAR", p, hs, l, r, exp, env, term_body=False)
        raise TypeCheckError("TY-VAL", p, f"not a value: {v!r}")


def _has_mmode(t) -> bool:
    t = resolve(t)
    match t:
        case MMode():
            return True
        case TSum(a, b) | TProd(a, b) | TAmpar(a, b):
            return _has_mmode(a) or _has_mmode(b)
        case TExp(m, a) | TDest(m, a):
            return _has_mmode(m) or _has_mmode(a)
        case TArrow(a, m, b):
            return _has_mmode(a) or _has_mmode(m) or _has_mmode(b)
        case TRec(_, a):
            return _has_mmode(a)
    return False


_schemes: dict = {}


def _closed_scheme(v: FunV):
    """Principal type of a function value that mentions no hole names, or None.

    Such a value types the same way wherever it occurs, and commands carry
    the same function values from step to step, so the result is cached.
    Schemes with an undetermined mode are not cached.
    """
    hit = _schemes.get(id(v))
    if hit is not None and hit[0] is v:
        return hit[1]
    scheme = None
    if len(_schemes) > 200_000:
        _schemes.clear()
    _schemes[id(v)] = (v, None)   # the check below takes the ordinary path for v itself
    if not value_names(v):
        sub = Checker()
        ty = Meta()
        try:
            u = sub.value(v, ty, Env(), None, ())()
            if not u.keys and not _has_mmode(ty):
                scheme = close_type(ty)
        except TypeCheckError:
            pass
    _schemes[id(v)] = (v, scheme)
    return scheme


_scope: dict = {}


def _scope_of(t) -> tuple:
    """(free variables, mentions hole names or a focus placeholder), cached per node."""
    hit = _scope.get(id(t))
    if hit is not None and hit[0] is t:
        return hit[1]
    match t:
        case Var(x):
            out = (frozenset({x}), False)
        case Val(v):
            out = (frozenset(), bool(value_names(v)))
        case OpenT() | _Focus():
            out = (frozenset(), True)
        case _:
            fv: set = set()
            named = False
            for c, bs in zip(children(t), binders(t)):
                cfv, cn = _scope_of(c)
                fv |= cfv - set(bs)
                named = named or cn
            out = (frozenset(fv), named)
    if len(_scope) > 500_000:
        _scope.clear()
    _scope[id(t)] = (t, out)
    return out


_term_schemes: dict = {}


def _closed_term(t):
    """(principal type scheme, usage) of a closed term without hole names, or None.

    Commands keep most of their subterms unchanged from one step to the
    next, so closed pieces are checked once and then only instantiated.
    """
    hit = _term_schemes.get(id(t))
    if hit is not None and hit[0] is t:
        return hit[1]
    fv, named = _scope_of(t)
    out = None
    if not fv and not named:
        if len(_term_schemes) > 200_000:
            _term_schemes.clear()
        _term_schemes[id(t)] = (t, None)   # the check below takes the ordinary path for t
        sub = Checker()
        ty = Meta()
        try:
            u = sub._term_uncached(t, ty)
            if not u.keys and not _has_mmode(ty):
                out = (close_type(ty), u)
        except TypeCheckError:
            pass
    _term_schemes[id(t)] = (t, out)
    return out


# ---------------------------------------------------------------- public API


def _root_env(g: Ctx) -> Env:
    vs, ds = {}, {}
    for k, b in g.items():
        if isinstance(k, VarKey):
            vs[k.name] = (b.mode, b.ty)
        elif isinstance(k, DestKey):
            ds[k.name] = b.ty
    return Env(vs, ds)


def _close(ch: Checker, u: UMap, g: Ctx, rule: str, path=()):
    for k, b in g.items():
        ch.oblige(rule, path, u.get(k), k, b.mode)
    for k in u.keys:
        if k not in g and None not in u.get(k):
            ch.fail(rule, path, f"{render_key(k)} is not bound here", k)


def check_term(g: Ctx, t, expected=None) -> Type:
    """Decide g |- t : expected; returns the (inferred) type."""
    for k in g:
        if isinstance(k, HoleKey):
            raise TypeCheckError("TY-TERM", (), f"hole binding {render_key(k)} in a term context")
    ch = Checker()
    exp = Meta() if expected is None else expected
    k = ch.term(t, exp, _root_env(g))
    _close(ch, k(), g, RULES.get(type(t), "TY-TERM"))
    return close_type(exp)


def infer_term(g: Ctx, t) -> Type:
    return check_term(g, t, None)


def check_value(th: Ctx, v, expected=None) -> Type:
    """Decide th ||- v : expected."""
    for k, b in th.items():
        if isinstance(k, VarKey):
            raise TypeCheckError("TY-VAL", (), f"variable binding {k.name} in a value context")
    ch = Checker()
    exp = Meta() if expected is None else expected
    sink: dict = {}
    uv = ch.value(v, exp, _root_env(th), sink, ())
    for h, (hty, hmode) in sink.items():
        b = th.get(HoleKey(h))
        if b is None:
            raise TypeCheckError("TY-VAL-HOLE", (), f"hole []{h} is not in the context")
        ch.mismatch("TY-VAL-HOLE", (), hty, b.ty)
    u = uv()
    for k, b in th.items():
        if isinstance(k, HoleKey):
            got = u.get(k)
            if got != exact(b.mode):
                ch.fail("TY-VAL-HOLE", (), f"hole {render_key(k)} is bound at {b.mode} but occurs as {got.describe()}", k)
        else:
            ch.oblige("TY-VAL-DEST", (), u.get(k), k, b.mode)
    for k in u.keys:
        if k not in th and None not in u.get(k):
            ch.fail("TY-VAL", (), f"{render_key(k)} is not bound here", k)
    return close_type(exp)


def _disjoint(stack):
    outer: set = set()
    for i, c in enumerate(stack):
        if isinstance(c, OpenAmpar):
            clash = outer & set(c.names)
            if clash:
                raise TypeCheckError(
                    "TY-ECTXS-OPENAMPAR", (i,),
                    f"names {sorted(clash)} of the open ampar also occur in the enclosing context")
        outer |= component_names(c)


def check_command(stack, focus, expected=None) -> Type:
    """Decide |- E[t] : U0 and return U0."""
    _disjoint(stack)
    ch = Checker()
    exp = Meta() if expected is None else expected
    k = ch.term(plug_all(stack, focus), exp, Env())
    _close(ch, k(), EMPTY, "TY-CMD")
    return close_type(exp)


def focus_type(stack, focus, expected=None) -> Type:
    """The type T of the focus in a derivation of |- E[t] : U0."""
    _disjoint(stack)
    ch = Checker()
    ch.watch = focus
    spine = [focus]
    for c in reversed(stack):
        spine.append(plug(c, spine[-1]))
    ch.uncached = {id(t) for t in spine}
    k = ch.term(spine[-1], Meta() if expected is None else expected, Env())
    _close(ch, k(), EMPTY, "TY-CMD")
    return close_type(ch.watched)


def check_ectx(stack, hole_ty: Type, result_ty: Type) -> Ctx:
    """The context Δ with Δ -| E : hole_ty -> result_ty.

    The focus is a placeholder whose usage of each name bound in E is probed
    over a finite candidate set; the least admissible choice is returned.
    """
    _disjoint(stack)
    ch = Checker()
    k = ch.term(plug_all(stack, _Focus(hole_ty)), result_ty, Env())
    ch.failures = []          # a first pass only settles types; names are probed below
    _close(ch, k(), EMPTY, "TY-CMD")
    bound: list[int] = []
    for c in stack:
        if isinstance(c, OpenAmpar):
            bound.extend(sorted(c.names))
    depth = sum(isinstance(c, OpenAmpar) for c in stack)
    candidates = [None] + all_modes(depth + 2)
    dest_types = ch.focus_dests or {}
    out = {}
    for h in bound:
        key = DestKey(h)
        chosen = "none"
        for c in candidates:
            ch.probe = (key, ABSENT if c is None else exact(c))
            ch.failures = []
            _close(ch, k(), EMPTY, "TY-CMD")
            if key not in ch.failures:
                chosen = c
                break
        ch.probe, ch.failures = None, None
        if chosen == "none":
            raise TypeCheckError("TY-ECTXS", (), f"no mode for ->{h} makes the context typeable")
        if chosen is not None:
            out[key] = Binding(chosen, close_type(dest_types[h]))
    return Ctx(out)


def term_of_command(stack, focus):
    return plug_all(stack, focus)


__all__ = [
    "TypeCheckError", "check_term", "infer_term", "check_value", "check_ectx",
    "check_command", "focus_type", "zonk", "Meta", "term_names",
]
