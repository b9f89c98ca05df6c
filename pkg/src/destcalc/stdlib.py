"""The prelude, the example corpus, and conversions between host data and values."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .parser import Program, parse
from .syntax import (
    AmparV, DestV, FunV, HoleV, InlV, InrV, ModV, PairV, UnitV, Value, pretty_value,
)

UNIT = UnitV()


def _read(name: str) -> str:
    return resources.files("destcalc.corpus").joinpath(name).read_text()


def prelude_source() -> str:
    return _read("prelude.ld")


@lru_cache(maxsize=1)
def prelude_program() -> Program:
    return parse(prelude_source())


# ---------------------------------------------------------------- encoders


def encode_bool(b: bool) -> Value:
    return InlV(UNIT) if b else InrV(UNIT)


def encode_nat(n: int) -> Value:
    if n < 0:
        raise ValueError("naturals are non-negative")
    v: Value = InlV(UNIT)
    for _ in range(n):
        v = InrV(v)
    return v


def encode_list(xs, elem=encode_nat) -> Value:
    v: Value = InlV(UNIT)
    for x in reversed(list(xs)):
        v = InrV(PairV(elem(x), v))
    return v


def encode_tree(t, elem=encode_nat) -> Value:
    """`None` is a leaf, `(x, left, right)` a node."""
    if t is None:
        return InlV(UNIT)
    x, l, r = t
    return InrV(PairV(elem(x), PairV(encode_tree(l, elem), encode_tree(r, elem))))


def encode_unit(_=None) -> Value:
    return UNIT


# ---------------------------------------------------------------- decoders


class DecodeError(ValueError):
    pass


def _bad(v, what):
    if isinstance(v, (HoleV, DestV, AmparV, FunV)):
        raise DecodeError(f"cannot decode {what}: found {pretty_value(v)}")
    raise DecodeError(f"not a {what}: {pretty_value(v)}")


def _unmod(v):
    while isinstance(v, ModV):
        v = v.body
    return v


def decode_unit(v: Value):
    if _unmod(v) != UNIT:
        _bad(v, "unit")
    return None


def decode_bool(v: Value) -> bool:
    match _unmod(v):
        case InlV(UnitV()):
            return True
        case InrV(UnitV()):
            return False
    _bad(v, "boolean")


def decode_nat(v: Value) -> int:
    n = 0
    v = _unmod(v)
    while isinstance(v, InrV):
        n, v = n + 1, _unmod(v.body)
    if v != InlV(UNIT):
        _bad(v, "natural")
    return n


def decode_list(v: Value, elem=decode_nat) -> list:
    out = []
    v = _unmod(v)
    while True:
        match v:
            case InlV(UnitV()):
                return out
            case InrV(PairV(x, rest)):
                out.append(elem(x))
                v = _unmod(rest)
            case _:
                _bad(v, "list")


def decode_tree(v: Value, elem=decode_nat):
    match _unmod(v):
        case InlV(UnitV()):
            return None
        case InrV(PairV(x, PairV(l, r))):
            return (elem(x), decode_tree(l, elem), decode_tree(r, elem))
    _bad(v, "tree")


def _elem_decoder(name: str):
    if name == "pretty":
        return pretty_value
    if ":" in name:
        outer, inner = name.split(":", 1)
        sub = _elem_decoder(inner)
        return {"list": lambda v: decode_list(v, sub), "tree": lambda v: decode_tree(v, sub)}[outer]
    return {"unit": decode_unit, "bool": decode_bool, "nat": decode_nat,
            "list": decode_list, "tree": decode_tree}[name]


def decoder(name: str):
    """Decoders by name: unit, bool, nat, pretty, list:ELEM, tree:ELEM."""
    try:
        return _elem_decoder(name)
    except KeyError:
        raise ValueError(f"unknown decoder {name!r}") from None


_KNOWN = ("Bool", "Nat", "List Nat", "List Bool", "List 1", "Tree Nat", "Tree Bool", "Tree 1")


@lru_cache(maxsize=1)
def _known_types():
    from .parser import parse_type

    aliases = prelude_program().aliases
    names = {"1": "unit", "Bool": "bool", "Nat": "nat"}
    out = []
    for text in _KNOWN:
        words = text.split()
        name = names[words[0]] if len(words) == 1 else f"{words[0].lower()}:{names[words[1]]}"
        out.append((parse_type(text, aliases), name))
    return tuple(out)


def decoder_for_type(ty) -> str | None:
    """The decoder name for a prelude data type, or None."""
    from .syntax import type_eq

    for known, name in _known_types():
        if type_eq(ty, known):
            return name
    return None


def render_decoded(v: Value, name: str) -> str:
    """A value decoded by name and printed as JSON; `pretty` prints the value itself."""
    if name == "pretty":
        return pretty_value(v)
    got = decoder(name)(v)
    if name.startswith("tree"):
        got = tree_to_json(got)
    return json.dumps(got)


def tree_to_json(t):
    return None if t is None else [t[0], tree_to_json(t[1]), tree_to_json(t[2])]


def tree_from_json(j):
    return None if j is None else (j[0], tree_from_json(j[1]), tree_from_json(j[2]))


def literal(v: Value) -> str:
    """A value as a source-level literal, for splicing host data into programs."""
    return f"@({pretty_value(v)})"


# ---------------------------------------------------------------- corpus


@dataclass
class Entry:
    name: str
    file: str
    expect: str            # "value", "type" or "error"
    ext_rec: bool = False
    type: str | None = None
    decode: str | None = None
    value: object = None
    rule: str | None = None
    note: str = ""

    def source(self) -> str:
        return _read(self.file)


@lru_cache(maxsize=1)
def manifest() -> tuple[Entry, ...]:
    data = json.loads(_read("manifest.json"))
    return tuple(Entry(**e) for e in data["programs"])


def entry(name: str) -> Entry:
    for e in manifest():
        if e.name == name:
            return e
    raise KeyError(name)


def relabel_reference(t, start: int = 1):
    """Breadth-first relabelling on host trees, used as an oracle."""
    labels = {}
    queue = [((), t)]
    while queue:
        path, n = queue.pop(0)
        if n is not None:
            labels[path] = start + len(labels)
            queue += [(path + (0,), n[1]), (path + (1,), n[2])]

    def go(path, n):
        return None if n is None else (labels[path], go(path + (0,), n[1]), go(path + (1,), n[2]))

    return go((), t)
