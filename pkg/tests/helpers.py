"""Shared test utilities: random JSON value generation for differential checks."""
from __future__ import annotations

import random
from typing import Any

from flowagent.schema import SchemaNode

_STRING_POOL = [
    "",
    "a",
    "wine",
    "Happy birthday!",
    'quote " inside',
    "back\\slash",
    "line\nbreak",
    "tab\there",
    "café au lait",
    "선물 추천",
    "🎁 gift",
    "🎉🎂",
    "  padded  ",
]

_JUNK_POOL: list[Any] = [
    None,
    True,
    False,
    0,
    -1,
    3.5,
    2.0,
    "junk",
    "",
    [],
    [1, 2],
    {},
    {"stray": 1},
]


def gen_valid(schema: SchemaNode, rng: random.Random) -> Any:
    """Generate a value that conforms to the schema."""
    kind = schema.kind
    if kind == "boolean":
        return rng.choice([True, False])
    if kind == "enum":
        return rng.choice(list(schema.enum_values))
    if kind == "integer":
        lo = -(10**6) if schema.minimum is None else int(schema.minimum)
        hi = 10**6 if schema.maximum is None else int(schema.maximum)
        return rng.randint(lo, hi)
    if kind == "number":
        lo = -(10**6) if schema.minimum is None else schema.minimum
        hi = 10**6 if schema.maximum is None else schema.maximum
        return rng.uniform(lo, hi)
    if kind == "string":
        lo = schema.min_length or 0
        hi = schema.max_length if schema.max_length is not None else lo + 8
        length = rng.randint(lo, max(lo, hi))
        alphabet = "abXY 9\"\\\n한🎁é"
        return "".join(rng.choice(alphabet) for _ in range(length))
    if kind == "array":
        return [gen_valid(schema.items, rng) for _ in range(rng.randint(0, 3))]
    if kind == "object":
        out = {}
        for name, sub in schema.properties:
            if name in schema.required or rng.random() < 0.5:
                out[name] = gen_valid(sub, rng)
        return out
    raise AssertionError(kind)


def mutate(schema: SchemaNode, value: Any, rng: random.Random) -> Any:
    """Perturb a value; the result usually (not necessarily) violates the schema."""
    kind = schema.kind
    roll = rng.random()
    if roll < 0.15:
        return rng.choice(_JUNK_POOL)
    if kind == "object" and isinstance(value, dict):
        out = dict(value)
        if roll < 0.4 and schema.required:
            out.pop(rng.choice(sorted(schema.required)), None)
        elif roll < 0.65:
            out["unexpected_" + rng.choice("xyz")] = rng.choice(_JUNK_POOL)
        elif out:
            name = rng.choice(sorted(out))
            sub = dict(schema.properties).get(name)
            out[name] = mutate(sub, out[name], rng) if sub else rng.choice(_JUNK_POOL)
        return out
    if kind == "array" and isinstance(value, list):
        return value + [rng.choice(_JUNK_POOL)]
    if kind == "string" and isinstance(value, str):
        if schema.max_length is not None and roll < 0.5:
            return value + "x" * (schema.max_length - len(value) + 1)
        if schema.min_length:
            return value[: schema.min_length - 1]
        return rng.choice(_JUNK_POOL)
    if kind == "integer" and isinstance(value, int):
        choices: list[Any] = [value + 0.5, float(value), str(value), bool(value % 2)]
        if schema.minimum is not None:
            choices.append(int(schema.minimum) - rng.randint(1, 3))
        if schema.maximum is not None:
            choices.append(int(schema.maximum) + rng.randint(1, 3))
        return rng.choice(choices)
    if kind == "boolean":
        return rng.choice(["true", "false", 1, 0])
    if kind == "enum":
        candidates: list[Any] = ["__nope__", None, 999999]
        for v in schema.enum_values:
            if isinstance(v, str):
                candidates += [v.upper(), v + "!", " " + v]
            elif isinstance(v, int) and not isinstance(v, bool):
                candidates += [v + 1, float(v)]
        return rng.choice(candidates)
    return rng.choice(_JUNK_POOL)


def gen_probe(schema: SchemaNode, rng: random.Random) -> Any:
    """Mixed stream of conforming, perturbed, and junk values."""
    roll = rng.random()
    if roll < 0.45:
        return gen_valid(schema, rng)
    if roll < 0.85:
        return mutate(schema, gen_valid(schema, rng), rng)
    return rng.choice(_JUNK_POOL)
