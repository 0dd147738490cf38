"""Compilation of schema nodes into character-level grammars.

A compiled grammar recognizes exactly the canonical serializations of the
values that conform to the source schema (see ``schema.canonical_json``), and
nothing that fails validation. The supported subset is non-recursive, so every
grammar denotes a regular language; productions are kept both as named rules
(for inspection) and as one inlined pattern used by the recognizer.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .schema import SchemaError, SchemaNode, generic_json


class UnsupportedConstructError(SchemaError):
    """Schema uses a construct the grammar compiler cannot express."""


# One JSON string character in canonical form: any literal char json.dumps
# leaves unescaped, a short escape, or a \uXXXX escape outside the surrogate
# range (so every alternative is exactly one character of the decoded string).
_STRING_CHAR = r'(?:[^"\\\x00-\x1f]|\\["\\/bfnrt]|\\u(?![dD][89a-fA-F])[0-9a-fA-F]{4})'


@dataclass(frozen=True)
class Grammar:
    """Character-level productions with a start symbol and a recognizer."""

    start: str
    rules: tuple[tuple[str, str], ...]
    source_schema: SchemaNode
    _pattern: re.Pattern = field(repr=False, compare=False, default=None)

    def accepts(self, text: str) -> bool:
        return self._pattern.fullmatch(text) is not None

    def describe(self) -> str:
        return "\n".join(f"{name} ::= {body}" for name, body in self.rules)


def recognize(grammar: Grammar, text: str) -> bool:
    """True iff ``text`` is a sentence of the grammar's language."""
    return grammar.accepts(text)


def compile_grammar(schema: SchemaNode) -> Grammar:
    """Compile a schema to a grammar; unsupported constructs raise."""
    builder = _Builder()
    start = builder.emit(schema, "", "root")
    pattern = re.compile(builder.bodies[start])
    return Grammar(
        start=start,
        rules=tuple((name, builder.bodies[name]) for name in builder.order),
        source_schema=schema,
        _pattern=pattern,
    )


class _Builder:
    """Walks the schema tree emitting one named rule per node.

    Rule bodies are regex fragments with sub-rules already inlined (the
    schema tree is finite and acyclic, so inlining always terminates).
    """

    def __init__(self) -> None:
        self.bodies: dict[str, str] = {}
        self.order: list[str] = []

    def _define(self, name: str, body: str) -> str:
        self.bodies[name] = body
        self.order.append(name)
        return name

    def emit(self, schema: SchemaNode, path: str, name: str) -> str:
        kind = schema.kind
        if kind == "boolean":
            body = "(?:true|false)"
        elif kind == "string":
            body = _string_pattern(schema.min_length, schema.max_length)
        elif kind == "integer":
            body = _int_pattern(schema.minimum, schema.maximum, path)
        elif kind == "number":
            raise UnsupportedConstructError(
                path, "non-integer numbers have no finite character-level grammar"
            )
        elif kind == "enum":
            literals = sorted(re.escape(generic_json(v)) for v in schema.enum_values)
            body = "(?:" + "|".join(literals) + ")"
        elif kind == "array":
            item = self.bodies[self.emit(schema.items, f"{path}/items", f"{name}.item")]
            body = rf"\[(?:{item}(?:,{item})*)?\]"
        elif kind == "object":
            body = self._object_body(schema, path, name)
        else:  # pragma: no cover - SchemaNode already rejects unknown kinds
            raise UnsupportedConstructError(path, f"unsupported kind {kind!r}")
        return self._define(name, body)

    def _object_body(self, schema: SchemaNode, path: str, name: str) -> str:
        values = [
            self.bodies[self.emit(sub, f"{path}/{prop}", f"{name}.{prop}")]
            for prop, sub in schema.properties
        ]
        memo: dict[tuple[int, bool], str] = {}

        def members(i: int, emitted: bool) -> str:
            # Members in declared order; optional ones may be skipped. The
            # separator depends on whether anything was emitted before.
            key = (i, emitted)
            if key in memo:
                return memo[key]
            if i == len(schema.properties):
                memo[key] = ""
                return ""
            prop, _ = schema.properties[i]
            member = (
                ("," if emitted else "")
                + re.escape(json.dumps(prop, ensure_ascii=False))
                + ":"
                + values[i]
                + members(i + 1, True)
            )
            if prop in schema.required:
                body = member
            else:
                body = f"(?:{member}|{members(i + 1, emitted)})"
            memo[key] = body
            return body

        return r"\{" + members(0, False) + r"\}"


def _string_pattern(min_length: int | None, max_length: int | None) -> str:
    lo = min_length or 0
    hi = "" if max_length is None else str(max_length)
    if lo == 0 and hi == "":
        reps = "*"
    else:
        reps = f"{{{lo},{hi}}}"
    return f'"{_STRING_CHAR}{reps}"'


def _int_pattern(minimum: int | float | None, maximum: int | float | None, path: str) -> str:
    for bound in (minimum, maximum):
        if bound is not None and bound != int(bound):
            raise UnsupportedConstructError(path, "integer bounds must be whole numbers")
    lo = None if minimum is None else int(minimum)
    hi = None if maximum is None else int(maximum)

    if lo is None and hi is None:
        return r"(?:0|-?[1-9][0-9]*)"
    if lo is None:
        if hi >= 0:
            return f"(?:-[1-9][0-9]*|{_nonneg_range(0, hi)})"
        return f"(?:-(?:{_nonneg_at_least(-hi)}))"
    if hi is None:
        if lo <= 0:
            parts = []
            if lo < 0:
                parts.append(f"-(?:{_nonneg_range(1, -lo)})")
            parts.append("0|[1-9][0-9]*")
            return "(?:" + "|".join(parts) + ")"
        return f"(?:{_nonneg_at_least(lo)})"
    parts = []
    if lo < 0:
        upper_neg = min(hi, -1)
        parts.append(f"-(?:{_nonneg_range(-upper_neg, -lo)})")
    if hi >= 0:
        parts.append(_nonneg_range(max(lo, 0), hi))
    return "(?:" + "|".join(parts) + ")"


def _nonneg_at_least(a: int) -> str:
    """Pattern for all decimal integers >= a >= 1 (no leading zeros)."""
    digits = len(str(a))
    same_len = _same_len_range(str(a), "9" * digits)
    longer = f"[1-9][0-9]{{{digits},}}"
    return f"{same_len}|{longer}"


def _nonneg_range(a: int, b: int) -> str:
    """Pattern for decimal integers in [a, b] with 0 <= a <= b."""
    parts = []
    for width in range(len(str(a)), len(str(b)) + 1):
        lo = a if width == len(str(a)) else 10 ** (width - 1)
        hi = b if width == len(str(b)) else 10**width - 1
        parts.append(_same_len_range(str(lo), str(hi)))
    return "|".join(parts)


def _same_len_range(a: str, b: str) -> str:
    """Pattern for the numeric range [a, b] where a and b have equal width."""
    if a == b:
        return a
    if len(a) == 1:
        return _digit_span(a, b)
    a0, b0 = a[0], b[0]
    rest = len(a) - 1
    zeros, nines = "0" * rest, "9" * rest
    if a0 == b0:
        return a0 + _group(_same_len_range(a[1:], b[1:]))
    parts = []
    mid_lo, mid_hi = ord(a0), ord(b0)
    if a[1:] != zeros:
        parts.append(a0 + _group(_same_len_range(a[1:], nines)))
        mid_lo += 1
    if b[1:] != nines:
        trailing_hi = b0 + _group(_same_len_range(zeros, b[1:]))
        mid_hi -= 1
    else:
        trailing_hi = None
    if mid_lo <= mid_hi:
        span = _digit_span(chr(mid_lo), chr(mid_hi))
        reps = f"{{{rest}}}" if rest > 1 else ""
        parts.append(f"{span}[0-9]{reps}")
    if trailing_hi is not None:
        parts.append(trailing_hi)
    return "|".join(parts)


def _digit_span(a: str, b: str) -> str:
    return a if a == b else f"[{a}-{b}]"


def _group(fragment: str) -> str:
    if "|" in fragment:
        return f"(?:{fragment})"
    return fragment
