"""Small-step evaluation of commands E[t].

Focus, unfocus and reduction are separate steps, each named after its rule.
Fresh hole names are computed from the command itself, never from a counter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    AmparV, App, AppL, AppR, CaseExp, CaseExpF, CaseProd, CaseProdF, CaseSum,
    CaseSumF, DestV, FillComp, FillCompL, FillCompR, FillExp, FillExpF,
    FillFun, FillFunF, FillInl, FillInlF, FillInr, FillInrF, FillLeaf,
    FillLeafL, FillLeafR, FillProd, FillProdF, FillUnit, FillUnitF, Fix, From,
    FromF, FunV, HoleV, InlV, InrV, ModV, New, OpenAmpar, PairV, Seq, SeqF, To,
    ToF, UnitV, Upd, UpdF, Val, component_names, plug, pretty_command,
    pretty_value, shift_set, shift_value, subst, subst_var,
)


@dataclass(frozen=True)
class Command:
    stack: tuple = ()
    focus: object = None

    def __str__(self):
        return pretty_command(self.stack, self.focus)


@dataclass(frozen=True)
class Next:
    rule: str
    command: Command


@dataclass(frozen=True)
class Terminal:
    value: object


@dataclass(frozen=True)
class Stuck:
    description: str


class StuckError(Exception):
    def __init__(self, step: int, command: Command, description: str):
        self.step, self.command, self.description = step, command, description
        super().__init__(f"stuck at step {step}: {description}")


class BudgetExceeded(Exception):
    def __init__(self, steps: int, command: Command):
        self.steps, self.command = steps, command
        super().__init__(f"step budget of {steps} exceeded")


def stack_names(stack) -> set[int]:
    out: set[int] = set()
    for c in stack:
        out |= component_names(c)
    return out


def _fresh(*groups) -> int:
    """max of the union, plus one; the max of nothing is 0."""
    return max((h for g in groups for h in g), default=0) + 1


# ---------------------------------------------------------------- hole substitution


def fill_value(v, h: int, w):
    """v with the hole []h replaced by w, respecting inner ampar binders."""
    match v:
        case HoleV(n):
            return w if n == h else v
        case InlV(a):
            return InlV(fill_value(a, h, w))
        case InrV(a):
            return InrV(fill_value(a, h, w))
        case ModV(m, a):
            return ModV(m, fill_value(a, h, w))
        case PairV(a, b):
            return PairV(fill_value(a, h, w), fill_value(b, h, w))
        case AmparV(hs, a, b) if h not in hs:
            return AmparV(hs, fill_value(a, h, w), fill_value(b, h, w))
    return v


class NoOwner(Exception):
    pass


def hole_substitute(stack, h: int, new_names, v) -> tuple:
    """E(h :=_H v): write v into the open ampar owning h."""
    stack = list(stack)
    for i in range(len(stack) - 1, -1, -1):
        c = stack[i]
        if isinstance(c, OpenAmpar) and h in c.names:
            names = (c.names - {h}) | frozenset(new_names)
            stack[i] = OpenAmpar(names, fill_value(c.left, h, v))
            return tuple(stack)
    raise NoOwner(f"no open ampar owns hole {h}")


# ---------------------------------------------------------------- the step function


def _is_val(t) -> bool:
    return isinstance(t, Val)


_UNFOCUS = {
    AppL: "APP-UNFOCUS1", AppR: "APP-UNFOCUS2", SeqF: "PATU-UNFOCUS",
    CaseSumF: "PATS-UNFOCUS", CaseProdF: "PATP-UNFOCUS", CaseExpF: "PATE-UNFOCUS",
    UpdF: "UPDA-UNFOCUS", ToF: "TOA-UNFOCUS", FromF: "FROMA-UNFOCUS",
    FillUnitF: "FILLU-UNFOCUS", FillInlF: "FILLL-UNFOCUS", FillInrF: "FILLR-UNFOCUS",
    FillProdF: "FILLP-UNFOCUS", FillExpF: "FILLE-UNFOCUS", FillFunF: "FILLF-UNFOCUS",
    FillCompL: "FILLCOMP-UNFOCUS1", FillCompR: "FILLCOMP-UNFOCUS2",
    FillLeafL: "FILLLEAF-UNFOCUS1", FillLeafR: "FILLLEAF-UNFOCUS2",
}

RULES = sorted(set(_UNFOCUS.values()) | {
    "APP-FOCUS1", "APP-FOCUS2", "APP-RED", "PATU-FOCUS", "PATU-RED",
    "PATS-FOCUS", "PATL-RED", "PATR-RED", "PATP-FOCUS", "PATP-RED",
    "PATE-FOCUS", "PATE-RED", "UPDA-FOCUS", "AMPAR-OPEN", "AMPAR-CLOSE",
    "TOA-FOCUS", "TOA-RED", "FROMA-FOCUS", "FROMA-RED", "NEWA-RED",
    "FILLU-FOCUS", "FILLU-RED", "FILLL-FOCUS", "FILLL-RED", "FILLR-FOCUS",
    "FILLR-RED", "FILLE-FOCUS", "FILLE-RED", "FILLP-FOCUS", "FILLP-RED",
    "FILLF-FOCUS", "FILLF-RED", "FILLCOMP-FOCUS1", "FILLCOMP-FOCUS2",
    "FILLCOMP-RED", "FILLLEAF-FOCUS1", "FILLLEAF-FOCUS2", "FILLLEAF-RED",
    "FIX-RED",
})


@dataclass(frozen=True)
class Options:
    # mutation switch for the harness: FILLCOMP-RED without renaming
    skip_fillcomp_shift: bool = False


DEFAULT = Options()


def step(c: Command, opts: Options = DEFAULT):
    stack, t = c.stack, c.focus

    def push(rule, comp, sub):
        return Next(rule, Command(stack + (comp,), sub))

    def here(rule, t2, st=None):
        return Next(rule, Command(stack if st is None else st, t2))

    if _is_val(t):
        v = t.value
        if not stack:
            return Terminal(v)
        top, rest = stack[-1], stack[:-1]
        if isinstance(top, OpenAmpar):
            return Next("AMPAR-CLOSE", Command(rest, Val(AmparV(top.names, top.left, v))))
        return Next(_UNFOCUS[type(top)], Command(rest, plug(top, t)))

    try:
        match t:
            case App(f, a):
                if not _is_val(a):
                    return push("APP-FOCUS1", AppL(f), a)
                if not _is_val(f):
                    return push("APP-FOCUS2", AppR(a.value), f)
                if isinstance(f.value, FunV):
                    return here("APP-RED", subst_var(f.value.body, f.value.var, a.value))
            case Seq(a, u):
                if not _is_val(a):
                    return push("PATU-FOCUS", SeqF(u), a)
                if isinstance(a.value, UnitV):
                    return here("PATU-RED", u)
            case CaseSum(m, s, x1, u1, x2, u2):
                if not _is_val(s):
                    return push("PATS-FOCUS", CaseSumF(m, x1, u1, x2, u2), s)
                match s.value:
                    case InlV(v):
                        return here("PATL-RED", subst_var(u1, x1, v))
                    case InrV(v):
                        return here("PATR-RED", subst_var(u2, x2, v))
            case CaseProd(m, s, x1, x2, u):
                if not _is_val(s):
                    return push("PATP-FOCUS", CaseProdF(m, x1, x2, u), s)
                if isinstance(s.value, PairV):
                    return here("PATP-RED", subst_var(subst_var(u, x1, s.value.left), x2, s.value.right))
            case CaseExp(m, n, s, x, u):
                if not _is_val(s):
                    return push("PATE-FOCUS", CaseExpF(m, n, x, u), s)
                if isinstance(s.value, ModV) and s.value.mode == n:
                    return here("PATE-RED", subst_var(u, x, s.value.body))
            case Upd(s, x, u):
                if not _is_val(s):
                    return push("UPDA-FOCUS", UpdF(x, u), s)
                if isinstance(s.value, AmparV):
                    hs, v2, v1 = s.value.names, s.value.left, s.value.right
                    k = _fresh(hs, stack_names(stack))
                    comp = OpenAmpar(shift_set(hs, k), shift_value(v2, hs, k))
                    return push("AMPAR-OPEN", comp, subst_var(u, x, shift_value(v1, hs, k)))
            case To(a):
                if not _is_val(a):
                    return push("TOA-FOCUS", ToF(), a)
                return here("TOA-RED", Val(AmparV(frozenset(), a.value, UnitV())))
            case From(a):
                if not _is_val(a):
                    return push("FROMA-FOCUS", FromF(), a)
                v = a.value
                if isinstance(v, AmparV) and not v.names and isinstance(v.right, ModV):
                    return here("FROMA-RED", Val(PairV(v.left, v.right)))
            case New():
                return here("NEWA-RED", Val(AmparV(frozenset({1}), HoleV(1), DestV(1))))
            case Fix(x, _, body):
                return here("FIX-RED", subst(body, x, t))
            case FillUnit(d) | FillInl(d) | FillInr(d) | FillProd(d) | FillExp(_, d) | FillFun(d, _, _, _):
                return _fill_hollow(t, d, stack, push, here)
            case FillComp(d, a):
                if not _is_val(d):
                    return push("FILLCOMP-FOCUS1", FillCompL(a), d)
                if not _is_val(a):
                    return push("FILLCOMP-FOCUS2", FillCompR(d.value), a)
                if isinstance(d.value, DestV) and isinstance(a.value, AmparV):
                    h = d.value.name
                    hs, v2, v1 = a.value.names, a.value.left, a.value.right
                    k = 0 if opts.skip_fillcomp_shift else _fresh(hs, stack_names(stack), {h})
                    new = hole_substitute(stack, h, shift_set(hs, k), shift_value(v2, hs, k))
                    return here("FILLCOMP-RED", Val(shift_value(v1, hs, k)), new)
            case FillLeaf(d, a):
                if not _is_val(d):
                    return push("FILLLEAF-FOCUS1", FillLeafL(a), d)
                if not _is_val(a):
                    return push("FILLLEAF-FOCUS2", FillLeafR(d.value), a)
                if isinstance(d.value, DestV):
                    new = hole_substitute(stack, d.value.name, (), a.value)
                    return here("FILLLEAF-RED", Val(UnitV()), new)
    except NoOwner as e:
        return Stuck(str(e))
    return Stuck(f"no rule applies to {pretty_command((), t)}")


_HOLLOW = {
    FillUnit: ("FILLU", FillUnitF), FillInl: ("FILLL", FillInlF),
    FillInr: ("FILLR", FillInrF), FillProd: ("FILLP", FillProdF),
    FillExp: ("FILLE", FillExpF), FillFun: ("FILLF", FillFunF),
}


def _fill_hollow(t, d, stack, push, here):
    name, frame = _HOLLOW[type(t)]
    if not _is_val(d):
        match t:
            case FillExp(m, _):
                comp = FillExpF(m)
            case FillFun(_, x, m, u):
                comp = FillFunF(x, m, u)
            case _:
                comp = frame()
        return push(f"{name}-FOCUS", comp, d)
    if not isinstance(d.value, DestV):
        return Stuck(f"{name} on a non-destination {pretty_value(d.value)}")
    h = d.value.name
    k = _fresh(stack_names(stack), {h})   # h'
    match t:
        case FillUnit():
            return here("FILLU-RED", Val(UnitV()), hole_substitute(stack, h, (), UnitV()))
        case FillFun(_, x, m, u):
            return here("FILLF-RED", Val(UnitV()), hole_substitute(stack, h, (), FunV(x, m, u)))
        case FillInl():
            return here("FILLL-RED", Val(DestV(k + 1)), hole_substitute(stack, h, {k + 1}, InlV(HoleV(k + 1))))
        case FillInr():
            return here("FILLR-RED", Val(DestV(k + 1)), hole_substitute(stack, h, {k + 1}, InrV(HoleV(k + 1))))
        case FillExp(m, _):
            return here("FILLE-RED", Val(DestV(k + 1)), hole_substitute(stack, h, {k + 1}, ModV(m, HoleV(k + 1))))
        case FillProd():
            hole = PairV(HoleV(k + 1), HoleV(k + 2))
            return here("FILLP-RED", Val(PairV(DestV(k + 1), DestV(k + 2))),
                        hole_substitute(stack, h, {k + 1, k + 2}, hole))


# ---------------------------------------------------------------- driving


@dataclass
class TraceLine:
    index: int
    rule: str
    command: Command

    def __str__(self):
        return f"{self.index:04d}  {self.rule}  {self.command}"


@dataclass
class RunResult:
    value: object
    steps: int
    trace: list = field(default_factory=list)
    rules: list = field(default_factory=list)


def start(term) -> Command:
    return Command((), term)


def run(term, max_steps: int = 100_000, trace: bool = False, opts: Options = DEFAULT) -> RunResult:
    """Iterate `step` from the empty context until a value remains."""
    c = term if isinstance(term, Command) else start(term)
    lines, rules = [], []
    for i in range(max_steps + 1):
        out = step(c, opts)
        match out:
            case Terminal(v):
                return RunResult(v, i, lines, rules)
            case Stuck(why):
                raise StuckError(i, c, why)
            case Next(rule, nxt):
                if i == max_steps:
                    break
                rules.append(rule)
                if trace:
                    lines.append(TraceLine(i + 1, rule, nxt))
                c = nxt
    raise BudgetExceeded(max_steps, c)


def iterate(term, max_steps: int = 100_000, opts: Options = DEFAULT):
    """Yield (index, rule, command) for the start and every step; the last outcome is returned."""
    c = term if isinstance(term, Command) else start(term)
    yield 0, None, c
    for i in range(1, max_steps + 1):
        out = step(c, opts)
        if not isinstance(out, Next):
            return out
        c = out.command
        yield i, out.rule, c
    return None


def format_trace(result: RunResult) -> str:
    lines = [str(line) for line in result.trace]
    lines.append(f"TERMINAL {pretty_value(result.value)}")
    return "\n".join(lines)
