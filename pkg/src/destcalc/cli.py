"""Command-line driver: check, run, trace, corpus and meta over `.ld` files."""

from __future__ import annotations

import argparse
import json
import sys

from .evaluator import BudgetExceeded, StuckError, run
from .parser import ParseError
from .program import ProgramError, check_loaded, load
from .syntax import pretty_command, pretty_type, pretty_value
from .typecheck import TypeCheckError

OK, TYPE_ERROR, PARSE_ERROR, STUCK, BUDGET, EXPECTATION = range(6)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ext", action="append", choices=["rec"], default=[],
                        help="enable a language extension (rec: recursive types and definitions)")
    common.add_argument("--max-steps", type=int, default=100_000, metavar="N",
                        help="evaluation step budget (default 100000)")
    common.add_argument("--format", choices=["text", "records"], default="text",
                        help="report format for corpus and meta")
    meta = argparse.ArgumentParser(add_help=False)
    meta.add_argument("--meta-every", type=int, default=1, metavar="N",
                      help="re-typecheck every N-th command (default 1)")
    meta.add_argument("--dest-every", type=int, default=10, metavar="N",
                      help="check destination modes every N-th command (default 10)")

    p = argparse.ArgumentParser(prog="destcalc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    c = sub.add_parser("check", parents=[common], help="typecheck a program and print the type of main")
    c.add_argument("file")
    r = sub.add_parser("run", parents=[common, meta], help="typecheck and evaluate a program")
    r.add_argument("file")
    r.add_argument("--trace", action="store_true", help="print every step before the value")
    r.add_argument("--meta", action="store_true", help="also check preservation, progress and names at each step")
    r.add_argument("--decode", default="auto", metavar="NAME",
                   help="auto (by the type of main), pretty, or a decoder such as list:nat")
    t = sub.add_parser("trace", parents=[common], help="print the step-by-step trace of a program")
    t.add_argument("file")
    k = sub.add_parser("corpus", parents=[common], help="check every corpus program against its expectation")
    k.add_argument("names", nargs="*", help="restrict to these entries")
    m = sub.add_parser("meta", parents=[common, meta], help="run the per-step metatheory checks")
    m.add_argument("files", nargs="*", help="programs to check (default: the positive corpus)")
    return p


def _err(msg: str):
    print(msg, file=sys.stderr)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as f:
        return f.read()


def _load(args, path):
    """(loaded, main type) or an exit code after reporting to stderr."""
    try:
        src = _read(path)
    except OSError as e:
        _err(f"{path}: {e.strerror}")
        return PARSE_ERROR
    try:
        loaded = load(src, ext_rec="rec" in args.ext)
    except ParseError as e:
        for d in e.diagnostics:
            _err(f"{path}:{d}")
        return PARSE_ERROR
    except ProgramError as e:
        _err(f"{path}: error: {e}")
        return TYPE_ERROR
    try:
        return loaded, check_loaded(loaded)
    except TypeCheckError as e:
        _err(f"{path}: type error: {e}")
        return TYPE_ERROR


def cmd_check(args) -> int:
    got = _load(args, args.file)
    if isinstance(got, int):
        return got
    print(pretty_type(got[1]))
    return OK


def _evaluate(args, loaded, trace: bool):
    try:
        return run(loaded.term, max_steps=args.max_steps, trace=trace)
    except StuckError as e:
        _err(f"{args.file}: stuck at step {e.step}: {e.description}")
        _err(f"  {pretty_command(e.command.stack, e.command.focus)}")
        return STUCK
    except BudgetExceeded as e:
        _err(f"{args.file}: step budget of {e.steps} exceeded")
        return BUDGET


def _print_trace(loaded, res):
    print(f"{0:04d}  START  {pretty_command((), loaded.term)}")
    for line in res.trace:
        print(line)


def cmd_run(args) -> int:
    from .stdlib import decoder_for_type, render_decoded

    got = _load(args, args.file)
    if isinstance(got, int):
        return got
    loaded, ty = got
    res = _evaluate(args, loaded, args.trace)
    if isinstance(res, int):
        return res
    if args.trace:
        _print_trace(loaded, res)
    name = args.decode
    if name == "auto":
        name = decoder_for_type(ty) or "pretty"
    try:
        print(render_decoded(res.value, name))
    except ValueError as e:
        _err(f"{args.file}: cannot decode the result: {e}")
        print(pretty_value(res.value))
        return EXPECTATION
    if args.meta:
        from .harness import meta_program

        rep = meta_program(loaded, name=args.file, max_steps=args.max_steps,
                           every=args.meta_every, dest_every=args.dest_every)
        print(rep.to_record() if args.format == "records" else rep.summary())
        if not rep.ok:
            return EXPECTATION
    return OK


def cmd_trace(args) -> int:
    got = _load(args, args.file)
    if isinstance(got, int):
        return got
    loaded, _ = got
    res = _evaluate(args, loaded, True)
    if isinstance(res, int):
        return res
    _print_trace(loaded, res)
    print(f"TERMINAL {pretty_value(res.value)}")
    return OK


def cmd_corpus(args) -> int:
    from .harness import check_entry
    from .stdlib import manifest

    entries = [e for e in manifest() if not args.names or e.name in args.names]
    missing = set(args.names) - {e.name for e in entries}
    if missing:
        _err(f"unknown corpus entries: {', '.join(sorted(missing))}")
        return EXPECTATION
    failed = 0
    for e in entries:
        r = check_entry(e, args.max_steps)
        failed += not r.ok
        if args.format == "records":
            print(json.dumps({"name": r.name, "ok": r.ok, "detail": r.detail, "steps": r.steps}, sort_keys=True))
        else:
            print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}")
    if args.format == "text":
        print(f"{len(entries) - failed}/{len(entries)} passed")
    return EXPECTATION if failed else OK


def cmd_meta(args) -> int:
    from .harness import meta_program, positive_entries

    kw = dict(max_steps=args.max_steps, every=args.meta_every, dest_every=args.dest_every)
    jobs = []
    if args.files:
        for path in args.files:
            got = _load(args, path)
            if isinstance(got, int):
                return got
            jobs.append((path, got[0]))
    else:
        for e in positive_entries():
            jobs.append((e.name, load(e.source(), ext_rec=e.ext_rec)))
    failed = 0
    for name, loaded in jobs:
        rep = meta_program(loaded, name=name, **kw)
        failed += not rep.ok
        print(rep.to_record() if args.format == "records" else rep.summary(), flush=True)
    return EXPECTATION if failed else OK


COMMANDS = {"check": cmd_check, "run": cmd_run, "trace": cmd_trace, "corpus": cmd_corpus, "meta": cmd_meta}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.max_steps < 0:
        _err("--max-steps must be non-negative")
        return PARSE_ERROR
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
