from hypothesis import given, strategies as st

from destcalc.modes import Mode, Mult, all_modes
from destcalc.usage import ABSENT, OCCURRENCE, WEAK, Usage

BIG = 12      # explicit universe for the set oracle
PROBE = 6     # ages compared; results at these ages only depend on ages <= BIG
UNI = all_modes(BIG)
PROBES = [None] + all_modes(PROBE)


def expand(u: Usage) -> frozenset:
    """The set as explicit elements, None standing for 'absent'."""
    return frozenset(m for m in [None] + UNI if m in u)


def o_add(a, b):
    out = set()
    for x in a:
        for y in b:
            out.add(y if x is None else x if y is None else x + y)
    return out


def o_scale(a, f):
    return {None if x is None else f * x for x in a}


def o_pre_up(a):
    up = Mode(Mult.ONE, 1)
    return {x for x in [None] + UNI if (None if x is None else up * x) in a}


def agree(u: Usage, ref):
    for m in PROBES:
        assert (m in u) == (m in ref), (m, u.describe())


small = st.one_of(st.integers(0, 3), st.none())
modes = st.builds(Mode, st.sampled_from(list(Mult)), small)
usages = st.builds(
    Usage, st.frozensets(modes, max_size=4), st.booleans(), st.one_of(st.none(), st.integers(0, 3)),
).map(Usage.normal) | st.sampled_from([ABSENT, OCCURRENCE, WEAK])


@given(usages, usages)
def test_add(a, b):
    agree(a + b, o_add(expand(a), expand(b)))


@given(usages, modes)
def test_scale(a, f):
    agree(a.scale(f), o_scale(expand(a), f))


@given(usages, usages)
def test_meet(a, b):
    agree(a.meet(b), expand(a) & expand(b))


@given(usages)
def test_pre_up(a):
    agree(a.pre_up(), o_pre_up(expand(a)))


def test_constants():
    assert None in ABSENT and not ABSENT.modes
    for m in all_modes(3):
        assert (m in OCCURRENCE) == (Mode(Mult.ONE, 0) <= m)
        assert (m in WEAK) == m.many
    assert None in WEAK


def test_describe():
    assert WEAK.describe() == "{winf, w^k (k>=0), unused}"
