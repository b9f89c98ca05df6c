"""Usage sets: for one binding key, every mode a derivation may assign it.

A term's derivation fixes, for each key, either no binding ("absent") or a
mode. Leaves contribute coerced occurrences (any m with 1v <= m) or, where
DisposableOnly allows it, weakened bindings (any w-mode). Rules combine these
by scaling, addition, intersection (case branches share a context) and the
preimage under 1^ (bodies of upd and the right side of ampars). Ages are
unbounded, so a set is kept as finitely many explicit modes plus an optional
tail {w^k | k >= tail}.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .modes import ABOVE_UNIT, MANY_INF, Mode, Mult


@dataclass(frozen=True)
class Usage:
    modes: frozenset = frozenset()
    absent: bool = False
    tail: int | None = None

    def normal(self) -> Usage:
        if self.tail is None:
            return self
        keep = frozenset(
            m for m in self.modes
            if not (m.many and m.age is not None and m.age >= self.tail)
        )
        return Usage(keep, self.absent, self.tail)

    def __contains__(self, m) -> bool:
        if m is None:
            return self.absent
        if m in self.modes:
            return True
        return self.tail is not None and m.many and m.age is not None and m.age >= self.tail

    def __add__(self, other: Usage) -> Usage:
        return _add(self, other)

    def _add(self, other: Usage) -> Usage:
        a, b = self, other
        modes = set()
        if a.absent:
            modes |= b.modes
        if b.absent:
            modes |= a.modes
        modes |= {x + y for x in a.modes for y in b.modes}
        for u, v in ((a, b), (b, a)):
            if u.tail is not None:
                for y in v.modes:
                    modes.add(MANY_INF)
                    if y.age is not None and y.age >= u.tail:
                        modes.add(Mode(Mult.MANY, y.age))
        tails = []
        if a.absent and b.tail is not None:
            tails.append(b.tail)
        if b.absent and a.tail is not None:
            tails.append(a.tail)
        if a.tail is not None and b.tail is not None:
            tails.append(max(a.tail, b.tail))
            modes.add(MANY_INF)
        tail = min(tails) if tails else None
        return Usage(frozenset(modes), a.absent and b.absent, tail).normal()

    def scale(self, f: Mode) -> Usage:
        return _scale(self, f)

    def _scale(self, f: Mode) -> Usage:
        modes = {f * m for m in self.modes}
        tail = None
        if self.tail is not None:
            if f.age is None:
                modes.add(MANY_INF)
            else:
                tail = self.tail + f.age
        return Usage(frozenset(modes), self.absent, tail).normal()

    def meet(self, other: Usage) -> Usage:
        return _meet(self, other)

    def _meet(self, other: Usage) -> Usage:
        modes = {m for m in self.modes if m in other} | {m for m in other.modes if m in self}
        tail = None
        if self.tail is not None and other.tail is not None:
            tail = max(self.tail, other.tail)
        return Usage(frozenset(modes), self.absent and other.absent, tail).normal()

    def pre_up(self) -> Usage:
        """{a | 1^ · a is in self}."""
        return _pre_up(self)

    def _pre_up(self) -> Usage:
        modes = set()
        for m in self.modes:
            if m.age is None:
                modes.add(m)
            elif m.age >= 1:
                modes.add(Mode(m.mult, m.age - 1))
        tail = None if self.tail is None else max(self.tail - 1, 0)
        return Usage(frozenset(modes), self.absent, tail).normal()

    def nonempty(self) -> bool:
        return self.absent or bool(self.modes) or self.tail is not None

    def describe(self) -> str:
        items = sorted((str(m) for m in self.modes))
        if self.tail is not None:
            items.append(f"w^k (k>={self.tail})")
        if self.absent:
            items.append("unused")
        return "{" + ", ".join(items) + "}"


_add = lru_cache(maxsize=None)(Usage._add)
_scale = lru_cache(maxsize=None)(Usage._scale)
_meet = lru_cache(maxsize=None)(Usage._meet)
_pre_up = lru_cache(maxsize=None)(Usage._pre_up)

ABSENT = Usage(absent=True)
OCCURRENCE = Usage(ABOVE_UNIT)
WEAK = Usage(frozenset({MANY_INF}), True, 0)


def exact(m: Mode) -> Usage:
    return Usage(frozenset({m}))


class UMap:
    """Per-key usage sets plus the set shared by every key not listed."""

    __slots__ = ("keys", "default")

    def __init__(self, keys=None, default: Usage = ABSENT):
        self.keys = dict(keys or {})
        self.default = default

    def get(self, k) -> Usage:
        return self.keys.get(k, self.default)

    def _zip(self, other: UMap, f) -> UMap:
        ks = self.keys.keys() | other.keys.keys()
        return UMap({k: f(self.get(k), other.get(k)) for k in ks}, f(self.default, other.default))

    def __add__(self, other: UMap) -> UMap:
        # ABSENT is the unit of addition
        if not other.keys and other.default == ABSENT:
            return self
        if not self.keys and self.default == ABSENT:
            return other
        return self._zip(other, _add)

    def meet(self, other: UMap) -> UMap:
        return self._zip(other, _meet)

    def scale(self, f: Mode) -> UMap:
        return UMap({k: u.scale(f) for k, u in self.keys.items()}, self.default.scale(f))

    def pre_up(self) -> UMap:
        return UMap({k: u.pre_up() for k, u in self.keys.items()}, self.default.pre_up())

    def without(self, *ks) -> UMap:
        return UMap({k: u for k, u in self.keys.items() if k not in ks}, self.default)

    def weaken(self) -> UMap:
        """Add DisposableOnly weakening at this leaf."""
        return self + UMap({}, WEAK)


def leaf(k) -> UMap:
    return UMap({k: OCCURRENCE}, WEAK)


EMPTY_TERM = UMap({}, WEAK)
EMPTY_VALUE = UMap({}, ABSENT)
