"""Typing contexts over variables, destinations and holes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .modes import ONE_NU, Mode
from .syntax import TDest, Type, pretty_type, type_eq


@dataclass(frozen=True, order=True)
class VarKey:
    name: str


@dataclass(frozen=True, order=True)
class DestKey:
    name: int


@dataclass(frozen=True, order=True)
class HoleKey:
    name: int


Key = Union[VarKey, DestKey, HoleKey]


@dataclass(frozen=True)
class Binding:
    mode: Mode
    ty: Type


class ContextError(Exception):
    def __init__(self, key, reason: str):
        super().__init__(f"{render_key(key)}: {reason}")
        self.key = key
        self.reason = reason


def _order(k: Key):
    return ({VarKey: 0, DestKey: 1, HoleKey: 2}[type(k)], str(k.name).rjust(12))


def render_key(k: Key) -> str:
    match k:
        case VarKey(n):
            return n
        case DestKey(h):
            return f"->{h}"
        case HoleKey(h):
            return f"[]{h}"
    return repr(k)


class Ctx:
    """An immutable finite map from keys to bindings."""

    __slots__ = ("_map",)

    def __init__(self, entries=None):
        m = dict(entries or {})
        for k, b in m.items():
            if isinstance(k, DestKey) and not isinstance(b.ty, TDest):
                raise ContextError(k, "destination binding must have a destination type")
            other = HoleKey(k.name) if isinstance(k, DestKey) else DestKey(k.name) if isinstance(k, HoleKey) else None
            if other is not None and other in m:
                raise ContextError(k, "bound both as a hole and as a destination")
        self._map = m

    def __getitem__(self, k: Key) -> Binding:
        return self._map[k]

    def get(self, k: Key, default=None):
        return self._map.get(k, default)

    def __contains__(self, k) -> bool:
        return k in self._map

    def __iter__(self):
        return iter(sorted(self._map, key=_order))

    def __len__(self) -> int:
        return len(self._map)

    def items(self):
        return [(k, self._map[k]) for k in self]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ctx) or self._map.keys() != other._map.keys():
            return False
        return all(
            b.mode == other._map[k].mode and type_eq(b.ty, other._map[k].ty)
            for k, b in self._map.items()
        )

    def __hash__(self):
        return hash(frozenset((k, b.mode) for k, b in self._map.items()))

    @property
    def kind(self) -> str:
        """Smallest context class containing this context: Δ, Γ or Θ."""
        has_var = any(isinstance(k, VarKey) for k in self._map)
        has_hole = any(isinstance(k, HoleKey) for k in self._map)
        if has_var and has_hole:
            return "mixed"
        return "Γ" if has_var else "Θ" if has_hole else "Δ"

    def names(self) -> set[int]:
        return {k.name for k in self._map if not isinstance(k, VarKey)}

    def shift(self, hs: frozenset, k: int) -> Ctx:
        def move(key):
            if isinstance(key, (DestKey, HoleKey)) and key.name in hs:
                return type(key)(key.name + k)
            return key

        return Ctx({move(key): b for key, b in self._map.items()})

    def __repr__(self) -> str:
        return render(self)


def render(c: Ctx) -> str:
    parts = []
    for k, b in c.items():
        parts.append(f"{render_key(k)} :{b.mode} {pretty_type(b.ty)}")
    return ", ".join(parts)


EMPTY = Ctx()


def ctx_add(a: Ctx, b: Ctx) -> Ctx:
    out = dict(a._map)
    for k, bb in b._map.items():
        if k in out:
            ba = out[k]
            if not type_eq(ba.ty, bb.ty):
                raise ContextError(k, "added with different types")
            out[k] = Binding(ba.mode + bb.mode, ba.ty)
        else:
            out[k] = bb
    try:
        return Ctx(out)
    except ContextError as e:
        raise ContextError(e.key, "sum is not defined: " + e.reason) from None


def ctx_scale(n: Mode, a: Ctx, literal_holes: bool = True) -> Ctx:
    """n · a. Variable and destination modes are multiplied; a hole's mode is
    replaced by n, as the value-context scaling equation is written.

    With `literal_holes=False` hole modes are multiplied too. That is the
    reading the checker uses internally (it keeps preservation under nested
    Mod fills); see the decisions notes.
    """
    out = {}
    for k, b in a._map.items():
        if isinstance(k, HoleKey) and literal_holes:
            out[k] = Binding(n, b.ty)
        else:
            out[k] = Binding(n * b.mode, b.ty)
    return Ctx(out)


def disposable_only(g: Ctx) -> bool:
    return all(b.mode.many for b in g._map.values())


def holes_from_dests(d: Ctx) -> Ctx:
    out = {}
    for k, b in d._map.items():
        if not isinstance(k, DestKey):
            raise ContextError(k, "only destination bindings can become holes")
        if b.mode != ONE_NU:
            raise ContextError(k, f"destination mode {b.mode} is not 1v, holes undefined")
        out[HoleKey(k.name)] = Binding(b.ty.mode, b.ty.body)
    return Ctx(out)
