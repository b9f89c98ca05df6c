import pytest

from destcalc.program import ProgramError, check_loaded, load, pragmas
from destcalc.typecheck import TypeCheckError


def test_pragmas():
    assert pragmas("-- ext: rec\n-- note\nmain = ()") == {"rec"}
    assert pragmas("main = ()\n-- ext: rec") == set()


def test_missing_main():
    with pytest.raises(ProgramError, match="no main"):
        load("def x = ()")


def test_cyclic_definitions():
    with pytest.raises(ProgramError, match="cyclic"):
        load("def a = b\ndef b = a\nmain = a", prelude=False)


def test_recursion_needs_extension():
    with pytest.raises(ProgramError, match="ext rec"):
        load("def rec f : 1 -o 1 = fun x -> f x\nmain = f ()", prelude=False)
    with pytest.raises(ProgramError, match="recursive types"):
        load("main : List 1 = toList (new : List 1)")
    assert load("main : List 1 = toList (new : List 1)", ext_rec=True)


def test_definitions_are_inlined():
    loaded = load("def u = ()\nmain = u", prelude=False)
    assert "u" in loaded.defs
    assert check_loaded(loaded) is not None


def test_definition_ascription_errors_name_the_definition():
    with pytest.raises(TypeCheckError) as e:
        check_loaded(load("def u : 1 (+) 1 = ()\nmain = u", prelude=False))
    assert "in definition u" in str(e.value)


def test_user_definitions_shadow_prelude():
    loaded = load("def true = ()\nmain = true")
    assert str(check_loaded(loaded)) == "TUnit()"
