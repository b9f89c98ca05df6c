"""Abstract syntax: types, terms, runtime values, sugar, evaluation contexts.

Terms embed runtime values through `Val`. Hole names are positive integers;
an ampar value `H<v2 & v1>` binds the names in H.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .modes import ONE_INF, ONE_NU, Mode

# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class TUnit:
    pass


@dataclass(frozen=True)
class TSum:
    left: Type
    right: Type


@dataclass(frozen=True)
class TProd:
    left: Type
    right: Type


@dataclass(frozen=True)
class TExp:
    mode: Mode
    body: Type


@dataclass(frozen=True)
class TArrow:
    arg: Type
    mode: Mode
    res: Type


@dataclass(frozen=True)
class TDest:
    mode: Mode
    body: Type


@dataclass(frozen=True)
class TAmpar:
    left: Type
    right: Type


@dataclass(frozen=True)
class TRec:
    name: str
    body: Type


@dataclass(frozen=True)
class TRecVar:
    name: str


@dataclass(frozen=True)
class TVar:
    """A rigid type variable, only found in definition signatures."""

    name: str


Type = Union[TUnit, TSum, TProd, TExp, TArrow, TDest, TAmpar, TRec, TRecVar, TVar]

UNIT = TUnit()


def type_subst(t: Type, env: dict) -> Type:
    """Replace RecVar/TVar names found in `env` (respecting rec binders)."""
    match t:
        case TRecVar(n) | TVar(n):
            return env.get(n, t)
        case TUnit():
            return t
        case TSum(a, b):
            return TSum(type_subst(a, env), type_subst(b, env))
        case TProd(a, b):
            return TProd(type_subst(a, env), type_subst(b, env))
        case TAmpar(a, b):
            return TAmpar(type_subst(a, env), type_subst(b, env))
        case TExp(m, a):
            return TExp(m, type_subst(a, env))
        case TDest(m, a):
            return TDest(m, type_subst(a, env))
        case TArrow(a, m, b):
            return TArrow(type_subst(a, env), m, type_subst(b, env))
        case TRec(n, body):
            inner = {k: v for k, v in env.items() if k != n}
            return TRec(n, type_subst(body, inner)) if inner else t
    return t


def unfold(t: Type) -> Type:
    while isinstance(t, TRec):
        t = type_subst(t.body, {t.name: t})
    return t


def type_vars(t: Type) -> set[str]:
    match t:
        case TVar(n):
            return {n}
        case TSum(a, b) | TProd(a, b) | TAmpar(a, b) | TArrow(a, _, b):
            return type_vars(a) | type_vars(b)
        case TExp(_, a) | TDest(_, a) | TRec(_, a):
            return type_vars(a)
    return set()


def uses_rec(t: Type) -> bool:
    match t:
        case TRec() | TRecVar():
            return True
        case TSum(a, b) | TProd(a, b) | TAmpar(a, b) | TArrow(a, _, b):
            return uses_rec(a) or uses_rec(b)
        case TExp(_, a) | TDest(_, a):
            return uses_rec(a)
    return False


def type_eq(a: Type, b: Type) -> bool:
    """Equirecursive equality: bisimulation up to unfolding."""
    seen: set = set()

    def go(a: Type, b: Type) -> bool:
        if a == b:
            return True
        if (a, b) in seen:
            return True
        if isinstance(a, TRec) or isinstance(b, TRec):
            seen.add((a, b))
            return go(unfold(a), unfold(b))
        match a, b:
            case (TSum(a1, a2), TSum(b1, b2)) | (TProd(a1, a2), TProd(b1, b2)) | (
                TAmpar(a1, a2),
                TAmpar(b1, b2),
            ):
                return go(a1, b1) and go(a2, b2)
            case TExp(m, a1), TExp(n, b1):
                return m == n and go(a1, b1)
            case TDest(m, a1), TDest(n, b1):
                return m == n and go(a1, b1)
            case TArrow(a1, m, a2), TArrow(b1, n, b2):
                return m == n and go(a1, b1) and go(a2, b2)
        return False

    return go(a, b)


# ---------------------------------------------------------------- values


@dataclass(frozen=True)
class HoleV:
    name: int


@dataclass(frozen=True)
class DestV:
    name: int


@dataclass(frozen=True)
class AmparV:
    names: frozenset
    left: Value
    right: Value


@dataclass(frozen=True)
class UnitV:
    pass


@dataclass(frozen=True)
class FunV:
    var: str
    mode: Mode
    body: Term


@dataclass(frozen=True)
class InlV:
    body: Value


@dataclass(frozen=True)
class InrV:
    body: Value


@dataclass(frozen=True)
class ModV:
    mode: Mode
    body: Value


@dataclass(frozen=True)
class PairV:
    left: Value
    right: Value


Value = Union[HoleV, DestV, AmparV, UnitV, FunV, InlV, InrV, ModV, PairV]

# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Seq:
    first: Term
    then: Term


@dataclass(frozen=True)
class CaseSum:
    mode: Mode
    scrut: Term
    x1: str
    u1: Term
    x2: str
    u2: Term


@dataclass(frozen=True)
class CaseProd:
    mode: Mode
    scrut: Term
    x1: str
    x2: str
    body: Term


@dataclass(frozen=True)
class CaseExp:
    mode: Mode
    inner: Mode
    scrut: Term
    var: str
    body: Term


@dataclass(frozen=True)
class Upd:
    scrut: Term
    var: str
    body: Term


@dataclass(frozen=True)
class To:
    body: Term


@dataclass(frozen=True)
class From:
    body: Term


@dataclass(frozen=True)
class New:
    ty: Type | None = None


@dataclass(frozen=True)
class FillUnit:
    dest: Term


@dataclass(frozen=True)
class FillInl:
    dest: Term


@dataclass(frozen=True)
class FillInr:
    dest: Term


@dataclass(frozen=True)
class FillProd:
    dest: Term


@dataclass(frozen=True)
class FillExp:
    mode: Mode
    dest: Term


@dataclass(frozen=True)
class FillFun:
    dest: Term
    var: str
    mode: Mode
    body: Term


@dataclass(frozen=True)
class FillComp:
    dest: Term
    arg: Term


@dataclass(frozen=True)
class FillLeaf:
    dest: Term
    arg: Term


@dataclass(frozen=True)
class Val:
    value: Value


@dataclass(frozen=True)
class Fix:
    """Recursion extension: `fix f : T. t`, f bound at mode winf in t."""

    var: str
    ty: Type
    body: Term


@dataclass(frozen=True)
class OpenT:
    """An open ampar rebuilt around a term; only used to type commands."""

    names: frozenset
    left: Value
    body: Term


# sugar


@dataclass(frozen=True)
class SInl:
    body: Term


@dataclass(frozen=True)
class SInr:
    body: Term


@dataclass(frozen=True)
class SMod:
    mode: Mode
    body: Term


@dataclass(frozen=True)
class SLam:
    var: str
    mode: Mode
    body: Term


@dataclass(frozen=True)
class SUnit:
    pass


@dataclass(frozen=True)
class SPair:
    left: Term
    right: Term


@dataclass(frozen=True)
class SFromP:
    body: Term


@dataclass(frozen=True)
class SLet:
    var: str
    mode: Mode
    bound: Term
    body: Term


Term = Union[
    Var, App, Seq, CaseSum, CaseProd, CaseExp, Upd, To, From, New,
    FillUnit, FillInl, FillInr, FillProd, FillExp, FillFun, FillComp, FillLeaf,
    Val, Fix, OpenT, SInl, SInr, SMod, SLam, SUnit, SPair, SFromP, SLet,
]

SUGAR = (SInl, SInr, SMod, SLam, SUnit, SPair, SFromP, SLet)

# ---------------------------------------------------------------- generic traversal


def children(t: Term) -> list[Term]:
    """Immediate subterms in path order (binders are transparent)."""
    match t:
        case Var() | New() | Val() | SUnit():
            return []
        case App(a, b) | Seq(a, b) | FillComp(a, b) | FillLeaf(a, b) | SPair(a, b):
            return [a, b]
        case CaseSum(_, s, _, u1, _, u2):
            return [s, u1, u2]
        case CaseProd(_, s, _, _, u) | CaseExp(_, _, s, _, u) | Upd(s, _, u):
            return [s, u]
        case FillFun(d, _, _, u):
            return [d, u]
        case SLet(_, _, a, b):
            return [a, b]
        case (To(a) | From(a) | FillUnit(a) | FillInl(a) | FillInr(a) | FillProd(a)
              | FillExp(_, a) | Fix(_, _, a) | OpenT(_, _, a) | SInl(a) | SInr(a)
              | SMod(_, a) | SLam(_, _, a) | SFromP(a)):
            return [a]
    raise TypeError(f"not a term: {t!r}")


def binders(t: Term) -> list[tuple[str, ...]]:
    """Names bound in each child, aligned with children()."""
    match t:
        case CaseSum(_, _, x1, _, x2, _):
            return [(), (x1,), (x2,)]
        case CaseProd(_, _, x1, x2, _):
            return [(), (x1, x2)]
        case CaseExp(_, _, _, x, _) | Upd(_, x, _) | FillFun(_, x, _, _) | SLet(x, _, _, _):
            return [(), (x,)]
        case Fix(x, _, _) | SLam(x, _, _):
            return [(x,)]
    return [()] * len(children(t))


def rebuild(t: Term, kids: list[Term]) -> Term:
    match t:
        case Var() | New() | Val() | SUnit():
            return t
        case App():
            return App(*kids)
        case Seq():
            return Seq(*kids)
        case FillComp():
            return FillComp(*kids)
        case FillLeaf():
            return FillLeaf(*kids)
        case SPair():
            return SPair(*kids)
        case CaseSum(m, _, x1, _, x2, _):
            return CaseSum(m, kids[0], x1, kids[1], x2, kids[2])
        case CaseProd(m, _, x1, x2, _):
            return CaseProd(m, kids[0], x1, x2, kids[1])
        case CaseExp(m, n, _, x, _):
            return CaseExp(m, n, kids[0], x, kids[1])
        case Upd(_, x, _):
            return Upd(kids[0], x, kids[1])
        case FillFun(_, x, m, _):
            return FillFun(kids[0], x, m, kids[1])
        case SLet(x, m, _, _):
            return SLet(x, m, kids[0], kids[1])
        case To():
            return To(kids[0])
        case From():
            return From(kids[0])
        case FillUnit():
            return FillUnit(kids[0])
        case FillInl():
            return FillInl(kids[0])
        case FillInr():
            return FillInr(kids[0])
        case FillProd():
            return FillProd(kids[0])
        case FillExp(m, _):
            return FillExp(m, kids[0])
        case Fix(x, ty, _):
            return Fix(x, ty, kids[0])
        case OpenT(h, v, _):
            return OpenT(h, v, kids[0])
        case SInl():
            return SInl(kids[0])
        case SInr():
            return SInr(kids[0])
        case SMod(m, _):
            return SMod(m, kids[0])
        case SLam(x, m, _):
            return SLam(x, m, kids[0])
        case SFromP():
            return SFromP(kids[0])
    raise TypeError(f"not a term: {t!r}")


def is_value(t: Term) -> bool:
    return isinstance(t, Val)


# ---------------------------------------------------------------- substitution


def subst(t: Term, x: str, r: Term) -> Term:
    """t[x := r] for a closed replacement r (so capture is impossible)."""
    match t:
        case Var(n):
            return r if n == x else t
        case Val() | New() | SUnit():
            return t
    kids = children(t)
    bound = binders(t)
    new = [k if x in b else subst(k, x, r) for k, b in zip(kids, bound)]
    if all(a is b for a, b in zip(new, kids)):
        return t
    return rebuild(t, new)


def subst_var(t: Term, x: str, v: Value) -> Term:
    return subst(t, x, Val(v))


def free_vars(t: Term) -> set[str]:
    match t:
        case Var(n):
            return {n}
        case Val() | New() | SUnit():
            return set()
    out: set[str] = set()
    for k, b in zip(children(t), binders(t)):
        out |= free_vars(k) - set(b)
    return out


def term_size(t: Term) -> int:
    return 1 + sum(term_size(k) for k in children(t))


# ---------------------------------------------------------------- hole names


def value_names(v: Value) -> set[int]:
    match v:
        case HoleV(h) | DestV(h):
            return {h}
        case AmparV(hs, l, r):
            return (value_names(l) | value_names(r)) - hs
        case InlV(a) | InrV(a) | ModV(_, a):
            return value_names(a)
        case PairV(a, b):
            return value_names(a) | value_names(b)
        case FunV(_, _, body):
            return term_names(body)
    return set()


def term_names(t: Term) -> set[int]:
    match t:
        case Val(v):
            return value_names(v)
        case OpenT(hs, v, body):
            return hs | value_names(v) | term_names(body)
    out: set[int] = set()
    for k in children(t):
        out |= term_names(k)
    return out


def shift_set(hs, k: int) -> frozenset:
    return frozenset(h + k for h in hs)


def shift_value(v: Value, hs: frozenset, k: int) -> Value:
    """v[H += k]: free names in H move up by k."""
    if not hs or k == 0:
        return v
    match v:
        case HoleV(h):
            return HoleV(h + k) if h in hs else v
        case DestV(h):
            return DestV(h + k) if h in hs else v
        case UnitV():
            return v
        case InlV(a):
            b = shift_value(a, hs, k)
            return v if b is a else InlV(b)
        case InrV(a):
            b = shift_value(a, hs, k)
            return v if b is a else InrV(b)
        case ModV(m, a):
            b = shift_value(a, hs, k)
            return v if b is a else ModV(m, b)
        case PairV(a, b):
            a2, b2 = shift_value(a, hs, k), shift_value(b, hs, k)
            return v if a2 is a and b2 is b else PairV(a2, b2)
        case FunV(x, m, body):
            b = shift_term(body, hs, k)
            return v if b is body else FunV(x, m, b)
        case AmparV(bound, l, r):
            free = (value_names(l) | value_names(r)) & (hs - bound)
            if not free:
                return v
            targets = {h + k for h in free}
            if targets & bound:
                # alpha-rename the inner binder out of the way first
                top = max(targets | bound | value_names(l) | value_names(r))
                l = shift_value(l, bound, top)
                r = shift_value(r, bound, top)
                bound = shift_set(bound, top)
            inner = frozenset(free)
            return AmparV(bound, shift_value(l, inner, k), shift_value(r, inner, k))
    raise TypeError(f"not a value: {v!r}")


def shift_term(t: Term, hs: frozenset, k: int) -> Term:
    match t:
        case Val(v):
            w = shift_value(v, hs, k)
            return t if w is v else Val(w)
        case Var() | New() | SUnit():
            return t
    kids = children(t)
    new = [shift_term(c, hs, k) for c in kids]
    if all(a is b for a, b in zip(new, kids)):
        return t
    return rebuild(t, new)


def hnames_of(e) -> set[int]:
    """Free hole names of a value, term, evaluation context or typing context."""
    from .contexts import Ctx

    if isinstance(e, Ctx):
        return e.names()
    if isinstance(e, (list, tuple)):
        out: set[int] = set()
        for c in e:
            out |= component_names(c)
        return out
    if isinstance(e, (HoleV, DestV, AmparV, UnitV, FunV, InlV, InrV, ModV, PairV)):
        return value_names(e)
    return term_names(e)


def shift_names(e, hs, k: int):
    from .contexts import Ctx

    hs = frozenset(hs)
    if isinstance(e, Ctx):
        return e.shift(hs, k)
    if isinstance(e, (HoleV, DestV, AmparV, UnitV, FunV, InlV, InrV, ModV, PairV)):
        return shift_value(e, hs, k)
    if isinstance(e, (set, frozenset)):
        return frozenset(h + k if h in hs else h for h in e)
    return shift_term(e, hs, k)


# ---------------------------------------------------------------- evaluation contexts


@dataclass(frozen=True)
class AppL:
    """`t' []`: the argument is under focus."""

    fn: Term


@dataclass(frozen=True)
class AppR:
    """`[] v`: the function is under focus."""

    arg: Value


@dataclass(frozen=True)
class SeqF:
    then: Term


@dataclass(frozen=True)
class CaseSumF:
    mode: Mode
    x1: str
    u1: Term
    x2: str
    u2: Term


@dataclass(frozen=True)
class CaseProdF:
    mode: Mode
    x1: str
    x2: str
    body: Term


@dataclass(frozen=True)
class CaseExpF:
    mode: Mode
    inner: Mode
    var: str
    body: Term


@dataclass(frozen=True)
class UpdF:
    var: str
    body: Term


@dataclass(frozen=True)
class ToF:
    pass


@dataclass(frozen=True)
class FromF:
    pass


@dataclass(frozen=True)
class FillUnitF:
    pass


@dataclass(frozen=True)
class FillInlF:
    pass


@dataclass(frozen=True)
class FillInrF:
    pass


@dataclass(frozen=True)
class FillProdF:
    pass


@dataclass(frozen=True)
class FillExpF:
    mode: Mode


@dataclass(frozen=True)
class FillFunF:
    var: str
    mode: Mode
    body: Term


@dataclass(frozen=True)
class FillCompL:
    arg: Term


@dataclass(frozen=True)
class FillCompR:
    dest: Value


@dataclass(frozen=True)
class FillLeafL:
    arg: Term


@dataclass(frozen=True)
class FillLeafR:
    dest: Value


@dataclass(frozen=True)
class OpenAmpar:
    names: frozenset
    left: Value


Component = Union[
    AppL, AppR, SeqF, CaseSumF, CaseProdF, CaseExpF, UpdF, ToF, FromF,
    FillUnitF, FillInlF, FillInrF, FillProdF, FillExpF, FillFunF,
    FillCompL, FillCompR, FillLeafL, FillLeafR, OpenAmpar,
]


def plug(c: Component, t: Term) -> Term:
    match c:
        case AppL(fn):
            return App(fn, t)
        case AppR(v):
            return App(t, Val(v))
        case SeqF(u):
            return Seq(t, u)
        case CaseSumF(m, x1, u1, x2, u2):
            return CaseSum(m, t, x1, u1, x2, u2)
        case CaseProdF(m, x1, x2, u):
            return CaseProd(m, t, x1, x2, u)
        case CaseExpF(m, n, x, u):
            return CaseExp(m, n, t, x, u)
        case UpdF(x, u):
            return Upd(t, x, u)
        case ToF():
            return To(t)
        case FromF():
            return From(t)
        case FillUnitF():
            return FillUnit(t)
        case FillInlF():
            return FillInl(t)
        case FillInrF():
            return FillInr(t)
        case FillProdF():
            return FillProd(t)
        case FillExpF(m):
            return FillExp(m, t)
        case FillFunF(x, m, u):
            return FillFun(t, x, m, u)
        case FillCompL(u):
            return FillComp(t, u)
        case FillCompR(v):
            return FillComp(Val(v), t)
        case FillLeafL(u):
            return FillLeaf(t, u)
        case FillLeafR(v):
            return FillLeaf(Val(v), t)
        case OpenAmpar(hs, v):
            return OpenT(hs, v, t)
    raise TypeError(f"not a component: {c!r}")


def plug_all(stack, t: Term) -> Term:
    for c in reversed(stack):
        t = plug(c, t)
    return t


def component_names(c: Component) -> set[int]:
    match c:
        case OpenAmpar(hs, v):
            return set(hs) | value_names(v)
        case AppR(v) | FillCompR(v) | FillLeafR(v):
            return value_names(v)
        case AppL(u) | SeqF(u) | UpdF(_, u) | FillFunF(_, _, u) | FillCompL(u) | FillLeafL(u):
            return term_names(u)
        case CaseSumF(_, _, u1, _, u2):
            return term_names(u1) | term_names(u2)
        case CaseProdF(_, _, _, u) | CaseExpF(_, _, _, u):
            return term_names(u)
    return set()


# ---------------------------------------------------------------- sugar


def from_prime(t: Term) -> Term:
    """from' t, expanded with the 1inf exponential."""
    tagged = Upd(t, "%un", Seq(Var("%un"), Val(ModV(ONE_INF, UnitV()))))
    return CaseProd(
        ONE_NU, From(tagged), "%st", "%ex",
        CaseExp(ONE_NU, ONE_INF, Var("%ex"), "%un", Seq(Var("%un"), Var("%st"))),
    )


def _build(body: Term) -> Term:
    return from_prime(Upd(New(), "%d", body))


def desugar(t: Term) -> Term:
    d = Var("%d")
    match t:
        case SInl(a):
            return _build(FillLeaf(FillInl(d), desugar(a)))
        case SInr(a):
            return _build(FillLeaf(FillInr(d), desugar(a)))
        case SMod(m, a):
            return _build(FillLeaf(FillExp(m, d), desugar(a)))
        case SLam(x, m, u):
            return _build(FillFun(d, x, m, desugar(u)))
        case SUnit():
            return _build(FillUnit(d))
        case SPair(a, b):
            return _build(CaseProd(
                ONE_NU, FillProd(d), "%d1", "%d2",
                Seq(FillLeaf(Var("%d1"), desugar(a)), FillLeaf(Var("%d2"), desugar(b))),
            ))
        case SFromP(a):
            return from_prime(desugar(a))
        case SLet(x, m, a, b):
            return desugar(App(SLam(x, m, b), a))
        case Var() | New() | Val():
            return t
    kids = children(t)
    new = [desugar(k) for k in kids]
    if all(a is b for a, b in zip(new, kids)):
        return t
    return rebuild(t, new)


def has_sugar(t: Term) -> bool:
    if isinstance(t, SUGAR):
        return True
    if isinstance(t, Val):
        return False
    return any(has_sugar(k) for k in children(t))


# ---------------------------------------------------------------- pretty printing


def pretty_mode(m) -> str:
    return str(m)


def pretty_type(t: Type, prec: int = 0) -> str:
    match t:
        case TUnit():
            return "1"
        case TVar(n) | TRecVar(n):
            return n
        case TDest(m, a):
            return f"[{m} {pretty_type(a)}]"
        case TExp(m, a):
            return _par(f"!{{{m}}} {pretty_type(a, 4)}", prec > 4)
        case TProd(a, b):
            return _par(f"{pretty_type(a, 4)} (*) {pretty_type(b, 3)}", prec > 3)
        case TSum(a, b):
            return _par(f"{pretty_type(a, 3)} (+) {pretty_type(b, 2)}", prec > 2)
        case TAmpar(a, b):
            return _par(f"{pretty_type(a, 1)} >< {pretty_type(b, 2)}", prec > 1)
        case TArrow(a, m, b):
            return _par(f"{pretty_type(a, 1)} -{{{m}}}o {pretty_type(b, 0)}", prec > 0)
        case TRec(n, body):
            return _par(f"rec {n}. {pretty_type(body)}", prec > 0)
    return str(t)


def _par(s: str, yes: bool) -> str:
    return f"({s})" if yes else s


def pretty_value(v: Value, atom: bool = False) -> str:
    match v:
        case UnitV():
            return "()"
        case HoleV(h):
            return f"[]{h}"
        case DestV(h):
            return f"->{h}"
        case PairV(a, b):
            return f"({pretty_value(a)}, {pretty_value(b)})"
        case InlV(a):
            return _par(f"Inl {pretty_value(a, True)}", atom)
        case InrV(a):
            return _par(f"Inr {pretty_value(a, True)}", atom)
        case ModV(m, a):
            return _par(f"Mod{{{m}}} {pretty_value(a, True)}", atom)
        case AmparV(hs, l, r):
            return f"{_names(hs)}<{pretty_value(l)} & {pretty_value(r)}>"
        case FunV(x, m, body):
            return _par(f"lam {x}{{{m}}} -> {pretty(body)}", atom)
    return f"<{v!r}>"


def _names(hs) -> str:
    return "{" + ",".join(str(h) for h in sorted(hs)) + "}"


# precedence: 0 = binder/seq level, 1 = fill operators, 2 = application, 3 = atom


def pretty(t, prec: int = 0) -> str:
    """Concrete syntax of a term, value, type or mode."""
    from .modes import Mode as _Mode

    if isinstance(t, _Mode):
        return str(t)
    if isinstance(t, (TUnit, TSum, TProd, TExp, TArrow, TDest, TAmpar, TRec, TRecVar, TVar)):
        return pretty_type(t)
    if isinstance(t, (HoleV, DestV, AmparV, UnitV, FunV, InlV, InrV, ModV, PairV)):
        return pretty_value(t)
    return _pt(t, prec)


def _pt(t: Term, prec: int) -> str:
    match t:
        case Var(n):
            return n
        case Val(v):
            if isinstance(v, (HoleV, DestV, AmparV)):
                return pretty_value(v)
            if isinstance(v, FunV):
                return _par(pretty_value(v), prec > 0)
            return "@" + pretty_value(v, True)
        case New(None):
            return "new"
        case New(ty):
            return f"(new : {pretty_type(ty)})"
        case SUnit():
            return "()"
        case SPair(a, b):
            return f"({_pt(a, 0)}, {_pt(b, 0)})"
        case App(f, a):
            return _par(f"{_pt(f, 2)} {_pt(a, 3)}", prec > 2)
        case To(a):
            return _par(f"to {_pt(a, 3)}", prec > 2)
        case From(a):
            return _par(f"from {_pt(a, 3)}", prec > 2)
        case SFromP(a):
            return _par(f"from' {_pt(a, 3)}", prec > 2)
        case SInl(a):
            return _par(f"Inl {_pt(a, 3)}", prec > 2)
        case SInr(a):
            return _par(f"Inr {_pt(a, 3)}", prec > 2)
        case SMod(m, a):
            return _par(f"Mod{{{m}}} {_pt(a, 3)}", prec > 2)
        case FillUnit(d):
            return _par(f"{_pt(d, 1)} <| ()", prec > 1)
        case FillInl(d):
            return _par(f"{_pt(d, 1)} <| Inl", prec > 1)
        case FillInr(d):
            return _par(f"{_pt(d, 1)} <| Inr", prec > 1)
        case FillProd(d):
            return _par(f"{_pt(d, 1)} <| (,)", prec > 1)
        case FillExp(m, d):
            return _par(f"{_pt(d, 1)} <| Mod{{{m}}}", prec > 1)
        case FillComp(d, a):
            return _par(f"{_pt(d, 1)} <o> {_pt(a, 2)}", prec > 1)
        case FillLeaf(d, a):
            return _par(f"{_pt(d, 1)} <! {_pt(a, 2)}", prec > 1)
        case FillFun(d, x, m, u):
            return _par(f"{_pt(d, 1)} <| fun {x}{{{m}}} -> {_pt(u, 0)}", prec > 0)
        case Seq(a, b):
            return _par(f"{_pt(a, 1)} ; {_pt(b, 0)}", prec > 0)
        case SLam(x, m, u):
            return _par(f"fun {x}{{{m}}} -> {_pt(u, 0)}", prec > 0)
        case SLet(x, m, a, b):
            return _par(f"let {x}{{{m}}} = {_pt(a, 0)} in {_pt(b, 0)}", prec > 0)
        case Upd(s, x, u):
            return _par(f"upd {_pt(s, 1)} with {x} -> {_pt(u, 0)}", prec > 0)
        case Fix(x, ty, u):
            return _par(f"fix {x} : {pretty_type(ty)}. {_pt(u, 0)}", prec > 0)
        case OpenT(hs, v, u):
            return f"op{_names(hs)}<{pretty_value(v)} & {_pt(u, 0)}>"
        case CaseSum(m, s, x1, u1, x2, u2):
            return (f"case[{m}] {_pt(s, 0)} of {{Inl {x1} -> {_pt(u1, 0)}"
                    f" | Inr {x2} -> {_pt(u2, 0)}}}")
        case CaseProd(m, s, x1, x2, u):
            return f"case[{m}] {_pt(s, 0)} of {{({x1}, {x2}) -> {_pt(u, 0)}}}"
        case CaseExp(m, n, s, x, u):
            return f"case[{m}] {_pt(s, 0)} of {{Mod{{{n}}} {x} -> {_pt(u, 0)}}}"
    return f"<{t!r}>"


FOCUS_L, FOCUS_R = "[[ ", " ]]"


def pretty_command(stack, focus: Term) -> str:
    """The command with its focus bracketed as `[[ t ]]`."""
    marker = Var("\0")
    text = _pt(plug_all(stack, marker), 0)
    return text.replace("\0", FOCUS_L + _pt(focus, 0) + FOCUS_R, 1)

