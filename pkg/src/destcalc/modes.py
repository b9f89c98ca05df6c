"""Modes: multiplicity x age, an ordered semiring.

Multiplicities are 1 and w. Ages are finite exponents k (written ^k, with
v = ^0) or inf. Finite ages are flatly ordered below inf.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class Mult(enum.Enum):
    ONE = "1"
    MANY = "w"

    def __add__(self, other: Mult) -> Mult:
        return Mult.MANY

    def __mul__(self, other: Mult) -> Mult:
        return Mult.ONE if self is Mult.ONE and other is Mult.ONE else Mult.MANY

    def le(self, other: Mult) -> bool:
        return self is other or other is Mult.MANY

    def __hash__(self) -> int:
        return 1 if self is Mult.ONE else 2


INF = None  # the infinite age


def age_add(a: int | None, b: int | None) -> int | None:
    return a if a is not None and a == b else INF


def age_mul(a: int | None, b: int | None) -> int | None:
    return INF if a is None or b is None else a + b


def age_le(a: int | None, b: int | None) -> bool:
    return b is None or a == b


@dataclass(frozen=True, order=False)
class Mode:
    mult: Mult
    age: int | None  # None is inf

    def __add__(self, other: Mode) -> Mode:
        return Mode(self.mult + other.mult, age_add(self.age, other.age))

    def __mul__(self, other: Mode) -> Mode:
        return Mode(self.mult * other.mult, age_mul(self.age, other.age))

    def __le__(self, other: Mode) -> bool:
        return self.mult.le(other.mult) and age_le(self.age, other.age)

    @property
    def many(self) -> bool:
        return self.mult is Mult.MANY

    @property
    def finite(self) -> bool:
        return self.age is not None

    def __str__(self) -> str:
        if self.age is None:
            age = "inf"
        elif self.age == 0:
            age = "v"
        else:
            age = f"^{self.age}"
        return self.mult.value + age

    __repr__ = __str__


def mode_add(m: Mode, n: Mode) -> Mode:
    return m + n


def mode_mul(m: Mode, n: Mode) -> Mode:
    return m * n


def mode_le(m: Mode, n: Mode) -> bool:
    return m <= n


ONE_NU = Mode(Mult.ONE, 0)
MANY_NU = Mode(Mult.MANY, 0)
ONE_UP = Mode(Mult.ONE, 1)
ONE_INF = Mode(Mult.ONE, INF)
MANY_INF = Mode(Mult.MANY, INF)

# the leaf coercion set {m | 1v <= m}
ABOVE_UNIT = frozenset({ONE_NU, MANY_NU, ONE_INF, MANY_INF})

_MODE_RE = re.compile(r"\s*([1w])\s*(v|inf|\^\s*(\d+))\s*$")


def parse_mode(text: str) -> Mode:
    """Parse `1v`, `w^2`, `1inf`, `w inf` and friends."""
    m = _MODE_RE.match(text)
    if not m:
        raise ValueError(f"bad mode {text!r}")
    mult = Mult.ONE if m.group(1) == "1" else Mult.MANY
    if m.group(2) == "v":
        age = 0
    elif m.group(2) == "inf":
        age = INF
    else:
        age = int(m.group(3))
    return Mode(mult, age)


def all_modes(max_age: int) -> list[Mode]:
    ages: list[int | None] = [*range(max_age + 1), INF]
    return [Mode(p, a) for p in Mult for a in ages]
