"""Concrete ASCII syntax: a regex lexer and a recursive-descent parser.

Precedence, loosest first: binders and `;` (0), fill operators (1, left
associative), application and prefix words (2), atoms (3). Types: arrows (0,
right), `><` (1, left), `(+)` (2, right), `(*)` (3, right), `!{m}` (4).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .modes import ONE_NU, Mode, parse_mode
from .syntax import (
    UNIT, AmparV, App, CaseExp, CaseProd, CaseSum, DestV, FillComp, FillExp,
    FillFun, FillInl, FillInr, FillLeaf, FillProd, FillUnit, Fix, From, FunV,
    HoleV, InlV, InrV, ModV, New, OpenT, PairV, SFromP, SInl, SInr, SLam, SLet,
    SMod, SPair, SUnit, Seq, TAmpar, TArrow, TDest, TExp, To, TProd, TRec, TRecVar,
    TSum, TVar, Type, UnitV, Upd, Val, Var, type_subst,
)


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass
class Def:
    name: str
    ty: Type | None
    body: object
    rec: bool = False
    line: int = 0


@dataclass
class Program:
    defs: list[Def] = field(default_factory=list)
    main: object = None
    main_ty: Type | None = None
    aliases: dict = field(default_factory=dict)

    def def_map(self) -> dict:
        return {d.name: d for d in self.defs}


# ---------------------------------------------------------------- lexer

_MODE = r"[1w]\s*(?:v|inf|\^\s*\d+)"
_TOKENS = [
    ("WS", r"\s+|--[^\n]*"),
    ("MODEB", r"\{\s*" + _MODE + r"\s*\}"),
    ("ARROW", r"-\{\s*" + _MODE + r"\s*\}o|-o(?![A-Za-z0-9_'%])"),
    ("MODE", r"[1w](?:v|inf|\^\d+)(?![A-Za-z0-9_'%])"),
    ("SYM", r"<\||<!|<o>|\(\+\)|\(\*\)|\(,\)|><|->|\[\]|[@&<>(){}\[\],;:=|.!]"),
    ("INT", r"\d+"),
    ("IDENT", r"[A-Za-z_%][A-Za-z0-9_'%]*"),
]
_LEX = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKENS))

KEYWORDS = {
    "case", "of", "upd", "with", "to", "from", "from'", "new", "fun", "lam",
    "let", "in", "fix", "def", "rec", "type", "main", "Inl", "Inr", "Mod", "op",
}


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


def lex(src: str, internal: bool = False) -> list[Tok]:
    toks, pos, line, start = [], 0, 1, 0
    while pos < len(src):
        m = _LEX.match(src, pos)
        if m is None:
            raise ParseError([Diagnostic("error", f"unexpected character {src[pos]!r}", line, pos - start + 1)])
        kind, text = m.lastgroup, m.group()
        if kind != "WS":
            if kind == "IDENT" and "%" in text and not internal:
                raise ParseError([Diagnostic("error", f"reserved name {text!r}", line, pos - start + 1)])
            if kind == "IDENT" and text in KEYWORDS:
                kind = "KW"
            toks.append(Tok(kind, text, line, pos - start + 1))
        for i, ch in enumerate(text):
            if ch == "\n":
                line, start = line + 1, pos + i + 1
        pos = m.end()
    toks.append(Tok("EOF", "", line, pos - start + 1))
    return toks


def _mode_text(tok: Tok) -> Mode:
    text = tok.text
    if tok.kind == "MODEB":
        text = text.strip()[1:-1]
    elif tok.kind == "ARROW":
        text = text[2:-2] if text != "-o" else "1v"
    return parse_mode(text)


# ---------------------------------------------------------------- parser


class Parser:
    def __init__(self, src: str, internal: bool = False, aliases=None):
        self.toks = lex(src, internal)
        self.i = 0
        self.aliases = dict(aliases or {})   # name -> (params, body | None while defining)
        self.rec_used: set[str] = set()

    # ---- token helpers

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text, kind="SYM") -> bool:
        return self.tok.text == text and self.tok.kind == kind

    def error(self, msg, tok=None):
        t = tok or self.tok
        raise ParseError([Diagnostic("error", msg, t.line, t.col)])

    def expect(self, text) -> Tok:
        if self.tok.text != text or self.tok.kind not in ("SYM", "KW"):
            what = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {what!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, text) -> bool:
        if self.tok.text == text and self.tok.kind in ("SYM", "KW"):
            self.i += 1
            return True
        return False

    def ident(self) -> str:
        if self.tok.kind != "IDENT":
            self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t.text

    def integer(self) -> int:
        if self.tok.kind != "INT":
            self.error(f"expected a hole name, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return int(t.text)

    def mode_brace(self, default=ONE_NU) -> Mode:
        if self.tok.kind == "MODEB":
            t = self.tok
            self.i += 1
            return _mode_text(t)
        if default is None:
            self.error("expected a mode such as {1v}")
        return default

    def mode_bare(self) -> Mode:
        if self.tok.kind != "MODE":
            self.error(f"expected a mode, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return _mode_text(t)

    # ---- types

    def type0(self) -> Type:
        a = self.type1()
        if self.tok.kind == "ARROW":
            m = _mode_text(self.tok)
            self.i += 1
            return TArrow(a, m, self.type0())
        return a

    def type1(self) -> Type:
        a = self.type2()
        while self.accept("><"):
            a = TAmpar(a, self.type2())
        return a

    def type2(self) -> Type:
        a = self.type3()
        if self.accept("(+)"):
            return TSum(a, self.type2())
        return a

    def type3(self) -> Type:
        a = self.type4()
        if self.accept("(*)"):
            return TProd(a, self.type3())
        return a

    def type4(self) -> Type:
        if self.accept("!"):
            m = self.mode_brace(None)
            return TExp(m, self.type4())
        if self.tok.kind == "IDENT" and self.tok.text in self.aliases:
            return self.alias_app()
        return self.type_atom()

    def _type_atom_start(self) -> bool:
        t = self.tok
        return (t.kind == "INT" and t.text == "1") or t.kind == "IDENT" or (t.kind == "SYM" and t.text in ("(", "["))

    def alias_app(self) -> Type:
        tok = self.tok
        name = self.ident()
        params, body = self.aliases[name]
        args = []
        for _ in params:
            if not self._type_atom_start():
                self.error(f"type {name} expects {len(params)} argument(s)", tok)
            args.append(self.type_atom())
        if body is None:
            # a recursive reference while the alias is being defined
            if tuple(args) != tuple(TVar(p) for p in params):
                self.error(f"recursive use of {name} must repeat its parameters", tok)
            self.rec_used.add(name)
            return TRecVar(name)
        return type_subst(body, dict(zip(params, args))) if params else body

    def type_atom(self) -> Type:
        t = self.tok
        if t.kind == "INT" and t.text == "1":
            self.i += 1
            return UNIT
        if t.kind == "IDENT":
            if t.text in self.aliases:
                params, _ = self.aliases[t.text]
                if not params:
                    return self.alias_app()
                self.error(f"type {t.text} needs arguments; parenthesize it")
            self.i += 1
            return TVar(t.text)
        if self.accept("("):
            a = self.type0()
            self.expect(")")
            return a
        if self.accept("["):
            m = self.mode_bare() if self.tok.kind == "MODE" else ONE_NU
            a = self.type0()
            self.expect("]")
            return TDest(m, a)
        if t.kind == "KW" and t.text == "rec":
            self.i += 1
            name = self.ident()
            self.expect(".")
            saved = self.aliases.get(name)
            self.aliases[name] = ((), None)
            body = self.type0()
            if saved is None:
                del self.aliases[name]
            else:
                self.aliases[name] = saved
            self.rec_used.discard(name)
            return TRec(name, body)
        self.error(f"expected a type, found {t.text or 'end of input'!r}")

    # ---- values

    def value(self):
        if self.accept("lam"):
            x = self.ident()
            m = self.mode_brace()
            self.expect("->")
            return FunV(x, m, self.term0())
        if self.accept("Inl"):
            return InlV(self.vatom())
        if self.accept("Inr"):
            return InrV(self.vatom())
        if self.accept("Mod"):
            m = self.mode_brace(None)
            return ModV(m, self.vatom())
        return self.vatom()

    def vatom(self):
        if self.accept("->"):
            return DestV(self.integer())
        if self.accept("[]"):
            return HoleV(self.integer())
        if self.at("{", "SYM"):
            hs = self.name_set()
            self.expect("<")
            left = self.value()
            self.expect("&")
            right = self.value()
            self.expect(">")
            return AmparV(hs, left, right)
        if self.accept("("):
            if self.accept(")"):
                return UnitV()
            a = self.value()
            if self.accept(","):
                b = self.value()
                self.expect(")")
                return PairV(a, b)
            self.expect(")")
            return a
        self.error(f"expected a value, found {self.tok.text or 'end of input'!r}")

    def name_set(self) -> frozenset:
        self.expect("{")
        hs = set()
        if not self.accept("}"):
            hs.add(self.integer())
            while self.accept(","):
                hs.add(self.integer())
            self.expect("}")
        return frozenset(hs)

    # ---- terms

    def term0(self):
        t = self.tok
        if self.accept("fun"):
            x = self.ident()
            m = self.mode_brace()
            self.expect("->")
            return SLam(x, m, self.term0())
        if t.text == "lam" and t.kind == "KW":
            return Val(self.value())
        if self.accept("let"):
            x = self.ident()
            m = self.mode_brace()
            self.expect("=")
            a = self.term0()
            self.expect("in")
            return SLet(x, m, a, self.term0())
        if self.accept("upd"):
            s = self.term1()
            self.expect("with")
            x = self.ident()
            self.expect("->")
            return Upd(s, x, self.term0())
        if self.accept("fix"):
            x = self.ident()
            self.expect(":")
            ty = self.type0()
            self.expect(".")
            return Fix(x, ty, self.term0())
        a = self.term1()
        if self.accept(";"):
            return Seq(a, self.term0())
        return a

    def term1(self):
        a = self.term2()
        while True:
            if self.accept("<|"):
                if self.accept("fun"):
                    x = self.ident()
                    m = self.mode_brace()
                    self.expect("->")
                    return FillFun(a, x, m, self.term0())
                if self.accept("Inl"):
                    a = FillInl(a)
                elif self.accept("Inr"):
                    a = FillInr(a)
                elif self.accept("(,)"):
                    a = FillProd(a)
                elif self.accept("Mod"):
                    a = FillExp(self.mode_brace(None), a)
                elif self.at("(", "SYM") and self.peek().text == ")":
                    self.i += 2
                    a = FillUnit(a)
                else:
                    self.error("expected (), Inl, Inr, (,), Mod{m} or fun after <|")
            elif self.accept("<o>"):
                a = FillComp(a, self.term2())
            elif self.accept("<!"):
                a = FillLeaf(a, self.term2())
            else:
                return a

    _PREFIX = ("to", "from", "from'", "Inl", "Inr", "Mod")

    def term2(self):
        t = self.tok
        if t.kind == "KW" and t.text in self._PREFIX:
            self.i += 1
            if t.text == "Mod":
                m = self.mode_brace(None)
                a = SMod(m, self.term3())
            else:
                a = {"to": To, "from": From, "from'": SFromP, "Inl": SInl, "Inr": SInr}[t.text](self.term3())
        else:
            a = self.term3()
        while self._atom_start():
            a = App(a, self.term3())
        return a

    def _atom_start(self) -> bool:
        t = self.tok
        if t.kind == "IDENT":
            return True
        if t.kind == "KW":
            return t.text in ("new", "case", "op")
        return t.kind == "SYM" and t.text in ("(", "@", "->", "[]", "{")

    def term3(self):
        t = self.tok
        if t.kind == "IDENT":
            self.i += 1
            return Var(t.text)
        if self.accept("new"):
            if self.accept(":"):
                return New(self.type0())
            return New()
        if self.accept("@"):
            return Val(self.vatom())
        if t.text in ("->", "[]", "{") and t.kind == "SYM":
            return Val(self.vatom())
        if self.accept("case"):
            return self.case_rest()
        if self.accept("op"):
            hs = self.name_set()
            self.expect("<")
            left = self.value()
            self.expect("&")
            body = self.term0()
            self.expect(">")
            return OpenT(hs, left, body)
        if self.accept("("):
            if self.accept(")"):
                return SUnit()
            a = self.term0()
            if self.accept(","):
                b = self.term0()
                self.expect(")")
                return SPair(a, b)
            self.expect(")")
            return a
        self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def case_rest(self):
        m = ONE_NU
        if self.accept("["):
            m = self.mode_bare()
            self.expect("]")
        s = self.term0()
        self.expect("of")
        self.expect("{")
        if self.accept("Inl"):
            x1 = self.ident()
            self.expect("->")
            u1 = self.term0()
            self.expect("|")
            self.expect("Inr")
            x2 = self.ident()
            self.expect("->")
            u2 = self.term0()
            self.expect("}")
            return CaseSum(m, s, x1, u1, x2, u2)
        if self.accept("Mod"):
            n = self.mode_brace(None)
            x = self.ident()
            self.expect("->")
            u = self.term0()
            self.expect("}")
            return CaseExp(m, n, s, x, u)
        self.expect("(")
        x1 = self.ident()
        self.expect(",")
        x2 = self.ident()
        self.expect(")")
        self.expect("->")
        u = self.term0()
        self.expect("}")
        return CaseProd(m, s, x1, x2, u)

    # ---- programs

    def program(self) -> Program:
        prog = Program(aliases=self.aliases)
        seen: set[str] = set()
        while self.tok.kind != "EOF":
            t = self.tok
            if self.accept("type"):
                self.type_decl(t)
            elif self.accept("def"):
                rec = self.accept("rec")
                name = self.ident()
                if name in seen:
                    self.error(f"duplicate definition {name}", t)
                seen.add(name)
                ty = None
                if self.accept(":"):
                    ty = self.type0()
                elif rec:
                    self.error("a recursive definition needs a type ascription")
                self.expect("=")
                prog.defs.append(Def(name, ty, self.term0(), rec, t.line))
            elif self.accept("main"):
                if prog.main is not None:
                    self.error("duplicate main", t)
                if self.accept(":"):
                    prog.main_ty = self.type0()
                self.expect("=")
                prog.main = self.term0()
            else:
                self.error(f"expected type, def or main, found {t.text!r}")
        return prog

    def type_decl(self, start: Tok):
        name = self.ident()
        if name in self.aliases:
            self.error(f"duplicate type {name}", start)
        params = []
        while self.tok.kind == "IDENT":
            params.append(self.ident())
        self.expect("=")
        self.aliases[name] = (tuple(params), None)
        self.rec_used.discard(name)
        body = self.type0()
        if name in self.rec_used:
            body = TRec(name, body)
        self.aliases[name] = (tuple(params), body)


def parse(src: str, internal: bool = False, aliases=None) -> Program:
    """Parse a whole program. Raises ParseError with positioned diagnostics."""
    return Parser(src, internal, aliases).program()


def parse_term(src: str, internal: bool = False, aliases=None):
    p = Parser(src, internal, aliases)
    t = p.term0()
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.text!r} after term")
    return t


def parse_type(src: str, aliases=None) -> Type:
    p = Parser(src, False, aliases)
    t = p.type0()
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.text!r} after type")
    return t


def parse_value(src: str):
    p = Parser(src, True)
    v = p.value()
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.text!r} after value")
    return v
