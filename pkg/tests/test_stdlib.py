import pytest
from hypothesis import given, settings, strategies as st

from destcalc.evaluator import run
from destcalc.harness import check_entry
from destcalc.parser import parse_value
from destcalc.program import check_loaded, load
from destcalc.stdlib import (
    DecodeError, decode_bool, decode_list, decode_nat, decode_tree, decoder, decoder_for_type,
    encode_bool, encode_list, encode_nat, encode_tree, literal, manifest, prelude_program,
    relabel_reference, render_decoded, tree_from_json, tree_to_json,
)
from destcalc.syntax import HoleV, InlV, UnitV

trees = st.recursive(st.none(), lambda t: st.tuples(st.integers(0, 5), t, t), max_leaves=8)


@given(st.integers(0, 30))
def test_nat_roundtrip(n):
    assert decode_nat(encode_nat(n)) == n


@given(st.lists(st.integers(0, 5), max_size=6))
def test_list_roundtrip(xs):
    assert decode_list(encode_list(xs)) == xs


@given(trees)
def test_tree_roundtrip(t):
    assert decode_tree(encode_tree(t)) == t
    assert tree_from_json(tree_to_json(t)) == t


@given(st.booleans())
def test_bool_roundtrip(b):
    assert decode_bool(encode_bool(b)) is b


def test_literal_parses_back():
    v = encode_list([1, 2])
    assert parse_value(literal(v)[2:-1]) == v


def test_decode_errors():
    with pytest.raises(DecodeError, match="found \\[\\]1"):
        decode_nat(HoleV(1))
    with pytest.raises(DecodeError):
        decode_bool(UnitV())
    with pytest.raises(ValueError):
        decoder("matrix")


def test_named_decoders():
    assert decoder("list:bool")(encode_list([True], encode_bool)) == [True]
    assert render_decoded(encode_tree((1, None, None)), "tree:nat") == "[1, null, null]"
    assert render_decoded(InlV(UnitV()), "pretty") == "Inl ()"


def test_decoder_for_type():
    from destcalc.parser import parse_type

    aliases = prelude_program().aliases
    assert decoder_for_type(parse_type("List Nat", aliases)) == "list:nat"
    assert decoder_for_type(parse_type("1 (+) 1")) == "bool"
    assert decoder_for_type(parse_type("1 (*) 1")) is None


@pytest.mark.parametrize("tree,labels", [
    (None, None),
    ((0, None, None), (1, None, None)),
    ((0, (0, (0, None, None), None), (0, None, (0, None, None))),
     (1, (2, (4, None, None), None), (3, None, (5, None, None)))),
])
def test_relabel_reference(tree, labels):
    assert relabel_reference(tree) == labels


def test_prelude_definitions_typecheck():
    prog = prelude_program()
    names = [d.name for d in prog.defs]
    assert {"succ", "map", "append", "concat", "toList", "enqueue", "dequeue", "relabelDPS"} <= set(names)
    for name in names:
        loaded = load(f"-- ext: rec\nmain = {name}")
        check_loaded(loaded)


def test_manifest_shape():
    entries = manifest()
    assert len({e.name for e in entries}) == len(entries)
    assert {e.expect for e in entries} == {"error", "value", "type"}
    for e in entries:
        assert ("-- ext: rec" in e.source()) == e.ext_rec, e.name


@pytest.mark.parametrize("e", manifest(), ids=lambda e: e.name)
def test_corpus_entry(e):
    r = check_entry(e)
    assert r.ok, r.detail


def _map_succ(xs):
    src = f"-- ext: rec\nmain : List Nat = map succ {literal(encode_list(xs))}\n"
    return decode_list(run(load(src).term).value)


@settings(max_examples=8)
@given(st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_map_matches_host(xs):
    assert _map_succ(xs) == [x + 1 for x in xs]
