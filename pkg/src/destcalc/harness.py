"""Executable metatheory: per-step preservation, progress and name discipline,
corpus expectations, and differential checking on enumerated small terms."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field

from .evaluator import DEFAULT, Command, Next, Options, Stuck, Terminal, start, step
from .parser import ParseError
from .program import Loaded, ProgramError, check_loaded, load
from .syntax import (
    AmparV, DestV, FunV, HoleV, InlV, InrV, ModV, OpenT, PairV, UnitV, Val,
    children, plug_all, pretty_command, pretty_type, pretty_value, term_names,
)
from .typecheck import TypeCheckError, check_command, check_ectx, check_value, focus_type
from .contexts import EMPTY

# rules whose side conditions pick fresh names
FRESH_RULES = frozenset({"FILLL-RED", "FILLR-RED", "FILLE-RED", "FILLP-RED", "FILLCOMP-RED", "AMPAR-OPEN"})


# ---------------------------------------------------------------- name discipline


def _audit_value(v, problems) -> tuple[Counter, Counter]:
    """Free hole and destination occurrences of v; closed ampars are audited on the way."""
    match v:
        case HoleV(h):
            return Counter({h: 1}), Counter()
        case DestV(h):
            return Counter(), Counter({h: 1})
        case UnitV():
            return Counter(), Counter()
        case InlV(a) | InrV(a) | ModV(_, a):
            return _audit_value(a, problems)
        case PairV(a, b):
            ha, da = _audit_value(a, problems)
            hb, db = _audit_value(b, problems)
            return ha + hb, da + db
        case FunV(_, _, body):
            return _audit(body, frozenset(), problems)
        case AmparV(hs, left, right):
            lh, ld = _audit_value(left, problems)
            rh, rd = _audit_value(right, problems)
            _pairing("ampar", hs, lh, rd, problems)
            return _drop(lh, hs) + rh, _drop(ld + rd, hs)
    raise TypeError(f"not a value: {v!r}")


def _drop(c: Counter, hs) -> Counter:
    return Counter({h: n for h, n in c.items() if h not in hs})


def _pairing(where, hs, holes: Counter, dests: Counter, problems):
    for h in sorted(hs):
        if holes[h] != 1:
            problems.append(f"{where} {sorted(hs)}: hole []{h} occurs {holes[h]} times in its structure")
        if dests[h] < 1:
            problems.append(f"{where} {sorted(hs)}: no destination ->{h}")


def _audit(t, scope: frozenset, problems) -> tuple[Counter, Counter]:
    match t:
        case Val(v):
            return _audit_value(v, problems)
        case OpenT(hs, left, body):
            clash = hs & scope
            if clash:
                problems.append(f"open ampar names {sorted(clash)} are already open outside")
            lh, ld = _audit_value(left, problems)
            bh, bd = _audit(body, scope | hs, problems)
            stray = set(lh) - hs
            if stray:
                problems.append(f"open ampar {sorted(hs)} holds holes {sorted(stray)} it does not own")
            if set(ld) & hs:
                problems.append(f"open ampar {sorted(hs)} stores its own destinations {sorted(set(ld) & hs)}")
            _pairing("open ampar", hs, lh, bd, problems)
            return _drop(lh, hs) + bh, _drop(ld + bd, hs)
    holes, dests = Counter(), Counter()
    for c in children(t):
        h, d = _audit(c, scope, problems)
        holes += h
        dests += d
    return holes, dests


def name_problems(c: Command) -> list[str]:
    """Global uniqueness of open names and one-to-one hole/destination pairing."""
    problems: list[str] = []
    holes, dests = _audit(plug_all(c.stack, c.focus), frozenset(), problems)
    if holes:
        problems.append(f"holes {sorted(holes)} are outside any structure that owns them")
    if dests:
        problems.append(f"destinations {sorted(dests)} have no open ampar owning them")
    return problems


def command_names(c: Command) -> set[int]:
    return term_names(plug_all(c.stack, c.focus))


def dest_mode_problems(c: Command, result_ty) -> list[str]:
    """Destinations provided by the context are linear and of finite age."""
    delta = check_ectx(c.stack, focus_type(c.stack, c.focus, result_ty), result_ty)
    return [
        f"->{k.name} is provided at mode {b.mode}"
        for k, b in delta.items()
        if b.mode.many or not b.mode.finite
    ]


# ---------------------------------------------------------------- reports


@dataclass
class MetaReport:
    program: str
    steps: int = 0
    checked: int = 0
    type: str | None = None
    preservation: bool = True
    progress: bool = True
    names: bool = True
    freshness: bool = True
    dest_modes: bool = True
    terminal: bool = False
    value: str | None = None
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.preservation and self.progress and self.names and self.freshness
                and self.dest_modes and self.terminal and not self.failures)

    def fail(self, kind: str, index: int, detail: str, command: Command | None = None):
        setattr(self, kind, False)
        if len(self.failures) < 20:
            rec = {"kind": kind, "step": index, "detail": detail}
            if command is not None:
                rec["command"] = pretty_command(command.stack, command.focus)
            self.failures.append(rec)

    def to_record(self) -> str:
        d = asdict(self)
        d["ok"] = self.ok
        return json.dumps(d, sort_keys=True)

    def summary(self) -> str:
        status = "ok" if self.ok else "FAIL"
        line = f"{self.program}: {status}, {self.steps} steps, {self.checked} checked"
        if self.failures:
            f = self.failures[0]
            line += f"; first failure at step {f['step']} ({f['kind']}): {f['detail']}"
        return line


def check_preservation_progress(
    term,
    expected=None,
    name: str = "main",
    max_steps: int = 100_000,
    every: int = 1,
    dest_every: int | None = None,
    opts: Options = DEFAULT,
) -> MetaReport:
    """Run `term`, re-checking every `every`-th command against the step-0 type.

    Names and freshness are audited at every step; the destination-mode
    invariant every `dest_every` steps (default: same stride as typing).
    """
    rep = MetaReport(name)
    dest_every = every if dest_every is None else dest_every
    c = term if isinstance(term, Command) else start(term)
    try:
        u0 = check_command(c.stack, c.focus, expected)
    except TypeCheckError as e:
        rep.fail("preservation", 0, f"step 0 does not typecheck: {e}", c)
        return rep
    rep.type = pretty_type(u0)
    before = command_names(c)
    for i in range(max_steps + 1):
        _audit_step(rep, i, c, u0, every, dest_every)
        out = step(c, opts)
        match out:
            case Terminal(v):
                rep.steps = i
                rep.value = pretty_value(v)
                if i % every:
                    _check_typing(rep, i, c, u0)
                try:
                    check_value(EMPTY, v, u0)
                    rep.terminal = True
                except TypeCheckError as e:
                    rep.fail("preservation", i, f"final value does not have type {rep.type}: {e}")
                return rep
            case Stuck(why):
                rep.steps = i
                rep.fail("progress", i, f"stuck: {why}", c)
                return rep
            case Next(rule, nxt):
                if i == max_steps:
                    break
                after = command_names(nxt)
                if rule in FRESH_RULES:
                    new = after - before
                    if before and new and min(new) <= max(before):
                        rep.fail("freshness", i + 1, f"{rule} introduced {sorted(new)} not above {max(before)}", nxt)
                before = after
                c = nxt
    rep.steps = max_steps
    rep.fail("progress", max_steps, f"no terminal state within {max_steps} steps")
    return rep


def _check_typing(rep: MetaReport, i: int, c: Command, u0):
    rep.checked += 1
    try:
        check_command(c.stack, c.focus, u0)
    except TypeCheckError as e:
        rep.fail("preservation", i, str(e), c)


def _audit_step(rep, i, c, u0, every, dest_every):
    probs = name_problems(c)
    if probs:
        rep.fail("names", i, "; ".join(probs), c)
    if i % every == 0:
        _check_typing(rep, i, c, u0)
    if dest_every and i % dest_every == 0 and c.stack:
        try:
            probs = dest_mode_problems(c, u0)
        except TypeCheckError as e:
            probs = [f"context not typeable: {e}"]
        if probs:
            rep.fail("dest_modes", i, "; ".join(probs), c)


def meta_program(loaded: Loaded, name: str = "main", **kw) -> MetaReport:
    ty = loaded.program.main_ty
    try:
        check_loaded(loaded)
    except TypeCheckError as e:
        rep = MetaReport(name)
        rep.fail("preservation", 0, f"program does not typecheck: {e}")
        return rep
    return check_preservation_progress(loaded.term, ty, name=name, **kw)


# ---------------------------------------------------------------- corpus


@dataclass
class EntryResult:
    name: str
    ok: bool
    detail: str
    steps: int | None = None


def check_entry(e, max_steps: int = 100_000) -> EntryResult:
    """Run one manifest entry and compare with its expectation."""
    from .evaluator import BudgetExceeded, StuckError, run
    from .stdlib import decoder, tree_to_json

    try:
        loaded = load(e.source(), ext_rec=e.ext_rec)
        ty = check_loaded(loaded)
    except (ParseError, ProgramError) as err:
        return EntryResult(e.name, False, f"does not load: {err}")
    except TypeCheckError as err:
        if e.expect == "error":
            ok = err.rule == e.rule
            return EntryResult(e.name, ok, f"rejected by {err.rule}" + ("" if ok else f", expected {e.rule}: {err}"))
        return EntryResult(e.name, False, f"unexpected type error: {err}")
    if e.expect == "error":
        return EntryResult(e.name, False, f"accepted at {pretty_type(ty)}, expected rejection by {e.rule}")
    if e.type is not None and pretty_type(ty) != e.type:
        return EntryResult(e.name, False, f"type {pretty_type(ty)}, expected {e.type}")
    if e.expect == "type":
        return EntryResult(e.name, True, f"type {pretty_type(ty)}")
    try:
        res = run(loaded.term, max_steps=max_steps)
    except (StuckError, BudgetExceeded) as err:
        return EntryResult(e.name, False, str(err))
    got = decoder(e.decode or "pretty")(res.value)
    if e.decode and e.decode.startswith("tree"):
        got = tree_to_json(got)
    ok = got == e.value
    return EntryResult(e.name, ok, f"value {json.dumps(got)}" + ("" if ok else f", expected {json.dumps(e.value)}"), res.steps)


def positive_entries():
    from .stdlib import manifest

    return [e for e in manifest() if e.expect == "value"]


def meta_corpus(max_steps: int = 100_000, every: int = 1, **kw) -> list[MetaReport]:
    out = []
    for e in positive_entries():
        loaded = load(e.source(), ext_rec=e.ext_rec)
        out.append(meta_program(loaded, name=e.name, max_steps=max_steps, every=every, **kw))
    return out


# ---------------------------------------------------------------- differential checking


def _mode(s):
    from .modes import parse_mode

    return parse_mode(s)


def default_type_universe():
    from .modes import ONE_INF, ONE_NU
    from .syntax import UNIT, TAmpar, TDest, TExp, TProd, TSum

    bool_ = TSum(UNIT, UNIT)
    return (UNIT, bool_, TProd(UNIT, UNIT), TDest(ONE_NU, UNIT), TDest(ONE_NU, bool_),
            TAmpar(UNIT, TExp(ONE_INF, UNIT)))


def default_mode_universe():
    return tuple(_mode(s) for s in ("1v", "wv", "1^1", "1inf", "winf"))


def enumerate_terms(size: int, scope: tuple[str, ...], modes, new_types):
    """Every core term of exactly `size` nodes over the variables in `scope`, typed or not."""
    from .syntax import (
        CaseExp, CaseProd, CaseSum, FillComp, FillExp, FillInl, FillInr, FillLeaf,
        FillProd, FillUnit, From, New, Seq, To, UnitV, Upd, Val, Var,
    )

    memo: dict = {}

    def go(n, sc):
        key = (n, sc)
        if key in memo:
            return memo[key]
        out = []
        if n == 1:
            out += [Var(x) for x in sc]
            out.append(Val(UnitV()))
            out += [New(t) for t in new_types]
        else:
            for a in go(n - 1, sc):
                out += [FillUnit(a), FillInl(a), FillInr(a), FillProd(a), To(a), From(a)]
                out += [FillExp(m, a) for m in modes]
            fresh = f"y{len(sc)}"
            inner = sc + (fresh,)
            for k in range(1, n - 1):
                lefts = go(k, sc)
                rights = go(n - 1 - k, sc)
                bodies = go(n - 1 - k, inner)
                for a in lefts:
                    out += [Seq(a, b) for b in rights]
                    out += [FillLeaf(a, b) for b in rights]
                    out += [FillComp(a, b) for b in rights]
                    out += [Upd(a, fresh, b) for b in bodies]
                    for m in modes:
                        out += [CaseExp(m, n2, a, fresh, b) for n2 in modes for b in bodies]
            two = sc + (fresh, f"y{len(sc) + 1}")
            for k in range(1, n - 2):
                for a in go(k, sc):
                    for b in go(n - 1 - k, two):
                        out += [CaseProd(m, a, fresh, two[-1], b) for m in modes]
            for k in range(1, n - 2):
                for j in range(1, n - 1 - k):
                    for a in go(k, sc):
                        for b1 in go(j, inner):
                            for b2 in go(n - 1 - k - j, inner):
                                out += [CaseSum(m, a, fresh, b1, fresh, b2) for m in modes]
        memo[key] = out
        return out

    return go(size, tuple(scope))


def enumerate_typed(size: int, env: tuple, modes, new_types):
    """Every core term of exactly `size` nodes whose types line up in `env`
    (pairs of name and type), ignoring modes; returned with its type."""
    from .declarative import Search, Unsupported, _Reject
    from .syntax import (
        CaseExp, CaseProd, CaseSum, FillComp, FillExp, FillInl, FillInr, FillLeaf,
        FillProd, FillUnit, From, New, Seq, TAmpar, TExp, TProd, TSum, To, UnitV,
        Upd, Val, Var, unfold,
    )
    from .contexts import VarKey

    search = Search({}, 10**12, 0)
    memo: dict = {}

    def ty(t, e):
        try:
            return search.synth(t, {VarKey(x): a for x, a in e})
        except (_Reject, Unsupported):
            return None

    def keep(cands, e, out):
        for t in cands:
            a = ty(t, e)
            if a is not None:
                out.append((t, a))

    def go(n, e):
        key = (n, e)
        if key in memo:
            return memo[key]
        out: list = []
        if n == 1:
            keep([Var(x) for x, _ in e] + [Val(UnitV())] + [New(t) for t in new_types], e, out)
        else:
            for a, _ in go(n - 1, e):
                keep([FillUnit(a), FillInl(a), FillInr(a), FillProd(a), To(a), From(a)]
                     + [FillExp(m, a) for m in modes], e, out)
            fresh = f"y{len(e)}"
            for k in range(1, n - 1):
                rights = go(n - 1 - k, e)
                for a, at in go(k, e):
                    keep([c(a, b) for b, _ in rights for c in (Seq, FillLeaf, FillComp)], e, out)
                    at = unfold(at)
                    if isinstance(at, TAmpar):
                        keep([Upd(a, fresh, b) for b, _ in go(n - 1 - k, e + ((fresh, at.right),))], e, out)
                    if isinstance(at, TExp):
                        bodies = go(n - 1 - k, e + ((fresh, at.body),))
                        keep([CaseExp(m, at.mode, a, fresh, b) for m in modes for b, _ in bodies], e, out)
            for k in range(1, n - 2):
                for a, at in go(k, e):
                    at = unfold(at)
                    if isinstance(at, TProd):
                        names = (fresh, f"y{len(e) + 1}")
                        bodies = go(n - 1 - k, e + ((names[0], at.left), (names[1], at.right)))
                        keep([CaseProd(m, a, *names, b) for m in modes for b, _ in bodies], e, out)
                    if isinstance(at, TSum):
                        for j in range(1, n - 1 - k):
                            b1s = go(j, e + ((fresh, at.left),))
                            b2s = go(n - 1 - k - j, e + ((fresh, at.right),))
                            keep([CaseSum(m, a, fresh, b1, fresh, b2)
                                  for m in modes for b1, t1 in b1s for b2, t2 in b2s if t1 == t2], e, out)
        memo[key] = out
        return out

    return go(size, tuple(env))


@dataclass
class DiffReport:
    terms: int = 0
    judgements: int = 0
    accepted: int = 0
    unsupported: int = 0
    budget: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements and self.budget == 0

    def summary(self) -> str:
        return (f"{self.terms} terms, {self.judgements} judgements, {self.accepted} accepted, "
                f"{len(self.disagreements)} disagreements, {self.budget} out of budget, "
                f"{self.unsupported} unsupported")


def compare_term(g, t, expected=None) -> tuple[bool, bool]:
    """(algorithmic accepts, declarative accepts) for g |- t : expected."""
    from .declarative import BUDGET, OK, check_term_declarative
    from .typecheck import check_term

    try:
        check_term(g, t, expected)
        alg = True
    except TypeCheckError:
        alg = False
    dec = check_term_declarative(g, t, expected)
    if dec == BUDGET:
        raise TimeoutError
    return alg, dec == OK


def enumerate_and_compare(size_bound: int = 6, type_universe=None, mode_universe=None,
                          new_types=None, untyped_bound: int = 3) -> DiffReport:
    """Run both checkers on small terms in every context of at most one variable.

    Terms whose types line up (modes aside) are enumerated up to `size_bound`
    and checked at their type; below `untyped_bound` every term is tried, so
    that type-level rejection is compared too.
    """
    from .contexts import Binding, Ctx, VarKey
    from .declarative import Unsupported
    from .syntax import pretty, pretty_type

    types = tuple(type_universe or default_type_universe())
    modes = tuple(mode_universe or default_mode_universe())
    new_types = tuple(new_types or types[:3])
    rep = DiffReport()

    def judge(g, t, ty):
        rep.judgements += 1
        try:
            alg, dec = compare_term(g, t, ty)
        except Unsupported:
            rep.unsupported += 1
            return
        except TimeoutError:
            rep.budget += 1
            return
        rep.accepted += alg
        if alg != dec:
            rep.disagreements.append({
                "term": pretty(t), "context": repr_ctx(g),
                "type": None if ty is None else pretty_type(ty),
                "algorithmic": alg, "declarative": dec})

    scopes = [((), [EMPTY])] + [
        ((("x", ty),), [Ctx({VarKey("x"): Binding(m, ty)}) for m in modes]) for ty in types]
    for env, ctxs in scopes:
        for n in range(1, size_bound + 1):
            for t, ty in enumerate_typed(n, env, modes, new_types):
                rep.terms += 1
                for g in ctxs:
                    judge(g, t, ty)
    for n in range(1, untyped_bound + 1):
        for t in enumerate_terms(n, ("x",), modes, new_types):
            rep.terms += 1
            for _, ctxs in scopes[1:]:
                for g in ctxs:
                    judge(g, t, None)
    return rep


def repr_ctx(g):
    from .contexts import render

    return render(g)
