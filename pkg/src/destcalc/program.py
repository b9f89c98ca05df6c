"""Whole programs: prelude merging, definition inlining and checking."""

from __future__ import annotations

from dataclasses import dataclass

from .contexts import EMPTY
from .parser import Def, Program, parse
from .syntax import (
    Fix, FunV, New, Val, children, desugar, free_vars, subst, uses_rec,
)
from .typecheck import TypeCheckError, check_term


class ProgramError(Exception):
    """A program-level problem: missing main, cyclic or gated definitions."""


@dataclass
class Loaded:
    program: Program
    term: object          # desugared core term for main
    defs: dict            # name -> desugared closed term, for every def reachable from main


def with_prelude(prog: Program, prelude: Program | None) -> Program:
    if prelude is None:
        return prog
    own = {d.name for d in prog.defs}
    defs = [d for d in prelude.defs if d.name not in own] + prog.defs
    aliases = dict(prelude.aliases)
    aliases.update(prog.aliases)
    return Program(defs, prog.main, prog.main_ty, aliases)


def _term_types(t):
    """Every type annotation appearing in a core term."""
    match t:
        case New(ty) if ty is not None:
            yield ty
        case Fix(_, ty, _):
            yield ty
        case Val(FunV(_, _, body)):
            yield from _term_types(body)
    for c in children(t):
        yield from _term_types(c)


def _uses_extension(t) -> bool:
    if isinstance(t, Fix):
        return True
    return any(uses_rec(ty) for ty in _term_types(t)) or any(_uses_extension(c) for c in children(t))


def resolve(prog: Program, ext_rec: bool = False) -> Loaded:
    """Inline definitions into main, in dependency order."""
    if prog.main is None:
        raise ProgramError("program has no main")
    table: dict[str, Def] = prog.def_map()
    done: dict[str, object] = {}
    active: list[str] = []

    def build(name: str):
        if name in done:
            return done[name]
        d = table[name]
        if name in active:
            cycle = " -> ".join(active[active.index(name):] + [name])
            raise ProgramError(f"cyclic definitions: {cycle}")
        active.append(name)
        body = desugar(d.body)
        deps = sorted(n for n in free_vars(body) if n in table and not (d.rec and n == name))
        for n in deps:
            body = subst(body, n, build(n))
        if d.rec:
            if not ext_rec:
                raise ProgramError(f"recursive definition {name} needs the recursion extension (--ext rec)")
            body = Fix(name, d.ty, body)
        active.pop()
        if not ext_rec and (_uses_extension(body) or (d.ty is not None and uses_rec(d.ty))):
            raise ProgramError(f"definition {name} uses recursive types; enable --ext rec")
        done[name] = body
        return body

    main = desugar(prog.main)
    for n in sorted(free_vars(main)):
        if n in table:
            main = subst(main, n, build(n))
    if not ext_rec and _uses_extension(main):
        raise ProgramError("main uses recursive types; enable --ext rec")
    return Loaded(prog, main, done)


def check_loaded(loaded: Loaded):
    """Check each reachable ascribed definition, then main. Returns main's type."""
    table = loaded.program.def_map()
    for name, term in loaded.defs.items():
        d = table[name]
        if d.ty is not None and not d.rec:
            _with_def(name, lambda: check_term(EMPTY, term, d.ty))
    return check_term(EMPTY, loaded.term, loaded.program.main_ty)


def _with_def(name, thunk):
    try:
        return thunk()
    except TypeCheckError as e:
        e.args = (f"in definition {name}: {e.args[0]}",)
        e.definition = name
        raise


def pragmas(src: str) -> set[str]:
    """Extensions requested by `-- ext: NAME` comment lines at the top of a file."""
    out = set()
    for line in src.splitlines():
        line = line.strip()
        if not line:
            continue
        if not line.startswith("--"):
            break
        words = line[2:].split()
        if words[:1] == ["ext:"]:
            out.update(words[1:])
    return out


def load(src: str, ext_rec: bool = False, prelude: bool = True) -> Loaded:
    from .stdlib import prelude_program

    ext_rec = ext_rec or "rec" in pragmas(src)
    pre = prelude_program() if prelude else None
    prog = parse(src, aliases=pre.aliases if pre else None)
    return resolve(with_prelude(prog, pre), ext_rec)


__all__ = ["ProgramError", "Loaded", "load", "pragmas", "resolve", "check_loaded", "with_prelude"]
