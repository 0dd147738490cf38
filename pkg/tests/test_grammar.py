"""Grammar compilation: soundness and completeness against the validator."""
from __future__ import annotations

import itertools
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from flowagent.grammar import UnsupportedConstructError, compile_grammar, recognize
from flowagent.schema import canonical_json, parse_schema, validate_value

from helpers import gen_probe


def test_enum_grammar_exact_language_by_enumeration():
    # Oracle: enumerate every string of length <= 3 over the terminal
    # alphabet; the grammar must accept exactly the two serialized members.
    grammar = compile_grammar(parse_schema({"enum": ["a", "b"]}))
    alphabet = ['"', "a", "b"]
    accepted = set()
    for length in range(0, 4):
        for chars in itertools.product(alphabet, repeat=length):
            text = "".join(chars)
            if recognize(grammar, text):
                accepted.add(text)
    assert accepted == {'"a"', '"b"'}


def test_boolean_grammar_closed_language():
    grammar = compile_grammar(parse_schema({"type": "boolean"}))
    assert recognize(grammar, "true")
    assert recognize(grammar, "false")
    for bad in ["True", "FALSE", " true", "true ", "1", "null", ""]:
        assert not recognize(grammar, bad), bad


def test_bounded_object_grammar_by_exhaustive_digits():
    schema = parse_schema(
        {
            "type": "object",
            "properties": {"n": {"type": "integer", "minimum": 0, "maximum": 9}},
            "required": ["n"],
        }
    )
    grammar = compile_grammar(schema)
    for n in range(0, 10):
        assert recognize(grammar, '{"n":%d}' % n)
    assert not recognize(grammar, '{"n":10}')
    assert not recognize(grammar, "{}")
    assert not recognize(grammar, '{"n":-1}')
    assert not recognize(grammar, '{"n": 1}')  # whitespace is not canonical


def test_missing_quotes_is_not_a_sentence():
    grammar = compile_grammar(parse_schema({"enum": ["a", "b"]}))
    assert not recognize(grammar, "a")


@pytest.mark.parametrize(
    "lo,hi",
    [
        (0, 0),
        (0, 9),
        (7, 7),
        (1, 10),
        (5, 123),
        (90, 110),
        (99, 100),
        (100, 999),
        (998, 1002),
        (-1, 1),
        (-120, -7),
        (-5, 37),
        (-10, -10),
        (12345, 12350),
    ],
)
def test_integer_range_grammar_exhaustive_window(lo, hi):
    schema = parse_schema({"type": "integer", "minimum": lo, "maximum": hi})
    grammar = compile_grammar(schema)
    for n in range(lo - 60, hi + 61):
        assert recognize(grammar, str(n)) == (lo <= n <= hi), n


def test_integer_range_exhaustive_ten_thousand():
    # Full-range oracle sweep for a |range| ~ 10^4 schema, plus margins.
    lo, hi = -3000, 7000
    grammar = compile_grammar(parse_schema({"type": "integer", "minimum": lo, "maximum": hi}))
    for n in range(lo - 50, hi + 51):
        assert recognize(grammar, str(n)) == (lo <= n <= hi), n


def test_integer_grammar_rejects_non_canonical_forms():
    grammar = compile_grammar(parse_schema({"type": "integer", "minimum": 0, "maximum": 100}))
    for bad in ["007", "+5", " 5", "5.0", "-0", "1e2"]:
        assert not recognize(grammar, bad), bad


@pytest.mark.parametrize(
    "doc,member,nonmember",
    [
        ({"type": "integer", "minimum": 10}, [10, 11, 99, 100, 10**7], [9, 0, -1, -100]),
        ({"type": "integer", "maximum": -3}, [-3, -4, -99, -10**6], [-2, -1, 0, 5]),
        ({"type": "integer", "maximum": 20}, [20, 0, -1, -10**6], [21, 100]),
        ({"type": "integer", "minimum": -2}, [-2, -1, 0, 1, 10**6], [-3, -100]),
        ({"type": "integer"}, [0, -1, 1, 10**9, -(10**9)], []),
    ],
)
def test_half_bounded_integer_grammars(doc, member, nonmember):
    grammar = compile_grammar(parse_schema(doc))
    for n in member:
        assert recognize(grammar, str(n)), n
    for n in nonmember:
        assert not recognize(grammar, str(n)), n


@settings(max_examples=200)
@given(
    lo=st.integers(min_value=-(10**6), max_value=10**6),
    span=st.integers(min_value=0, max_value=10**6),
    probe=st.integers(min_value=-(2 * 10**6), max_value=3 * 10**6),
)
def test_integer_range_membership_property(lo, span, probe):
    hi = lo + span
    grammar = compile_grammar(parse_schema({"type": "integer", "minimum": lo, "maximum": hi}))
    assert recognize(grammar, str(probe)) == (lo <= probe <= hi)


def test_string_grammar_handles_escapes_and_unicode():
    schema = parse_schema({"type": "string", "min_length": 1, "max_length": 5})
    grammar = compile_grammar(schema)
    for value in ["a", "héllo", "🎁🎂", 'a"b', "x\\y", "a\nb", "abcde"]:
        text = canonical_json(schema, value)
        assert recognize(grammar, text), text
    assert not recognize(grammar, '""')  # below min_length
    assert not recognize(grammar, json.dumps("abcdef"))  # above max_length
    assert not recognize(grammar, '"unterminated')


def test_number_kind_is_an_unsupported_construct():
    schema = parse_schema(
        {"type": "object", "properties": {"score": {"type": "number"}}}
    )
    with pytest.raises(UnsupportedConstructError) as err:
        compile_grammar(schema)
    assert "/score" in str(err.value)


def test_optional_properties_comma_placement():
    schema = parse_schema(
        {
            "type": "object",
            "properties": {
                "a": {"type": "boolean"},
                "b": {"type": "boolean"},
                "c": {"type": "boolean"},
            },
            "required": ["b"],
        }
    )
    grammar = compile_grammar(schema)
    assert recognize(grammar, '{"b":true}')
    assert recognize(grammar, '{"a":true,"b":false}')
    assert recognize(grammar, '{"b":true,"c":false}')
    assert recognize(grammar, '{"a":true,"b":false,"c":true}')
    assert not recognize(grammar, '{"a":true,"c":false}')  # b required
    assert not recognize(grammar, '{"b":true,}')
    assert not recognize(grammar, '{"c":false,"b":true}')  # canonical order only


def test_array_grammar():
    schema = parse_schema({"type": "array", "items": {"enum": ["x", "y"]}})
    grammar = compile_grammar(schema)
    assert recognize(grammar, "[]")
    assert recognize(grammar, '["x"]')
    assert recognize(grammar, '["x","y","y"]')
    assert not recognize(grammar, '["x",]')
    assert not recognize(grammar, '["z"]')


def test_grammar_exposes_named_productions():
    grammar = compile_grammar(
        parse_schema({"type": "object", "properties": {"n": {"type": "integer"}}})
    )
    names = [name for name, _ in grammar.rules]
    assert "root" in names
    assert "root.n" in names
    assert "::=" in grammar.describe()


DIFFERENTIAL_SCHEMAS = [
    {"type": "boolean"},
    {"enum": ["birthday", "anniversary", "wedding"]},
    {"enum": [1, 2, 3]},
    {"type": "integer", "minimum": 0, "maximum": 9},
    {"type": "integer", "minimum": -50, "maximum": 5000},
    {"type": "integer"},
    {"type": "string", "min_length": 1, "max_length": 12},
    {"type": "array", "items": {"type": "integer", "minimum": 0, "maximum": 99}},
    {
        "type": "object",
        "properties": {
            "query": {"type": "string", "min_length": 1, "max_length": 30},
            "price_min": {"type": "integer", "minimum": 1},
            "price_max": {"type": "integer", "minimum": 1},
            "category": {"enum": ["wine", "tech", "books"]},
        },
        "required": ["query"],
    },
    {
        "type": "object",
        "properties": {
            "who": {"type": "string", "max_length": 10},
            "nested": {
                "type": "object",
                "properties": {"deep": {"type": "boolean"}},
                "required": ["deep"],
            },
            "ids": {"type": "array", "items": {"type": "string", "min_length": 1}},
        },
        "required": ["nested"],
    },
]


@pytest.mark.parametrize("doc", DIFFERENTIAL_SCHEMAS, ids=range(len(DIFFERENTIAL_SCHEMAS)))
def test_recognizer_agrees_with_validator(doc):
    # Differential route: grammar membership of the canonical serialization
    # must coincide with validator emptiness on every probed value.
    schema = parse_schema(doc)
    grammar = compile_grammar(schema)
    rng = random.Random(hash(json.dumps(doc, sort_keys=True)) & 0xFFFF)
    for _ in range(400):
        value = gen_probe(schema, rng)
        expected = validate_value(schema, value) == []
        got = recognize(grammar, canonical_json(schema, value))
        assert got == expected, (value, canonical_json(schema, value))
