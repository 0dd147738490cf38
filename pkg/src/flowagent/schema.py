"""JSON-schema subset used by tool nodes: parsing, value validation, canonical form.

The subset covers flat-to-moderately-nested tool argument shapes: objects with
declared properties (undeclared properties are rejected), arrays, strings with
length bounds, integers/numbers with numeric bounds, booleans, and enums of
literals. Anything beyond that (unions, $ref, patterns) is deliberately out.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

KINDS = ("object", "array", "string", "integer", "number", "boolean", "enum")

_ALLOWED_KEYS = {
    "object": {"type", "properties", "required"},
    "array": {"type", "items"},
    "string": {"type", "min_length", "max_length"},
    "integer": {"type", "minimum", "maximum"},
    "number": {"type", "minimum", "maximum"},
    "boolean": {"type"},
    "enum": {"enum"},
}


class SchemaError(ValueError):
    """Malformed schema document."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path or '/'}: {reason}")


@dataclass(frozen=True)
class Violation:
    """One conformance failure, anchored at a JSON-pointer-style path."""

    path: str
    reason: str

    def __str__(self) -> str:
        return f"{self.path or '/'}: {self.reason}"


@dataclass(frozen=True)
class SchemaNode:
    kind: str
    properties: tuple[tuple[str, "SchemaNode"], ...] = ()
    required: frozenset[str] = frozenset()
    items: "SchemaNode | None" = None
    enum_values: tuple[Any, ...] = ()
    minimum: int | float | None = None
    maximum: int | float | None = None
    min_length: int | None = None
    max_length: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SchemaError("", f"unknown schema kind {self.kind!r}")
        names = {name for name, _ in self.properties}
        if len(names) != len(self.properties):
            raise SchemaError("", "duplicate property names")
        if not self.required <= names:
            missing = sorted(self.required - names)
            raise SchemaError("", f"required names not declared: {missing}")
        if self.kind == "enum" and not self.enum_values:
            raise SchemaError("", "enum must list at least one value")
        if self.minimum is not None and self.maximum is not None and self.minimum > self.maximum:
            raise SchemaError("", "minimum exceeds maximum")
        if self.min_length is not None and self.min_length < 0:
            raise SchemaError("", "min_length must be non-negative")
        if (
            self.min_length is not None
            and self.max_length is not None
            and self.min_length > self.max_length
        ):
            raise SchemaError("", "min_length exceeds max_length")
        if self.kind == "array" and self.items is None:
            raise SchemaError("", "array schema needs items")


def parse_schema(doc: Any, path: str = "") -> SchemaNode:
    """Parse a schema document (strict: unknown keys are errors)."""
    if not isinstance(doc, dict):
        raise SchemaError(path, "schema must be an object")
    if "enum" in doc:
        kind = "enum"
    else:
        kind = doc.get("type")
        if kind not in _ALLOWED_KEYS or kind == "enum":
            raise SchemaError(path, f"missing or unknown type {kind!r}")
    unknown = set(doc) - _ALLOWED_KEYS[kind]
    if unknown:
        raise SchemaError(path, f"unknown keys: {sorted(unknown)}")

    try:
        if kind == "enum":
            values = doc["enum"]
            if not isinstance(values, list) or not values:
                raise SchemaError(path, "enum must be a non-empty list")
            for v in values:
                if not isinstance(v, (str, int, float, bool)):
                    raise SchemaError(path, "enum values must be scalar literals")
            return SchemaNode(kind="enum", enum_values=tuple(values))
        if kind == "object":
            props_doc = doc.get("properties", {})
            if not isinstance(props_doc, dict):
                raise SchemaError(path, "properties must be an object")
            props = tuple(
                (name, parse_schema(sub, f"{path}/{name}")) for name, sub in props_doc.items()
            )
            required = doc.get("required", [])
            if not isinstance(required, list):
                raise SchemaError(path, "required must be a list")
            return SchemaNode(kind="object", properties=props, required=frozenset(required))
        if kind == "array":
            if "items" not in doc:
                raise SchemaError(path, "array schema needs items")
            return SchemaNode(kind="array", items=parse_schema(doc["items"], f"{path}/items"))
        if kind == "string":
            return SchemaNode(
                kind="string",
                min_length=_opt_int(doc, "min_length", path),
                max_length=_opt_int(doc, "max_length", path),
            )
        # integer / number / boolean
        minimum = doc.get("minimum")
        maximum = doc.get("maximum")
        for bound, name in ((minimum, "minimum"), (maximum, "maximum")):
            if bound is not None and not _is_number(bound):
                raise SchemaError(path, f"{name} must be a number")
        return SchemaNode(kind=kind, minimum=minimum, maximum=maximum)
    except SchemaError as err:
        if err.path == "" and path:
            raise SchemaError(path, err.reason) from None
        raise


def schema_to_dict(schema: SchemaNode) -> dict:
    """Serialize back to the document form (inverse of parse_schema)."""
    if schema.kind == "enum":
        return {"enum": list(schema.enum_values)}
    doc: dict[str, Any] = {"type": schema.kind}
    if schema.kind == "object":
        doc["properties"] = {name: schema_to_dict(sub) for name, sub in schema.properties}
        if schema.required:
            doc["required"] = sorted(schema.required)
    elif schema.kind == "array":
        doc["items"] = schema_to_dict(schema.items)
    elif schema.kind == "string":
        if schema.min_length is not None:
            doc["min_length"] = schema.min_length
        if schema.max_length is not None:
            doc["max_length"] = schema.max_length
    else:
        if schema.minimum is not None:
            doc["minimum"] = schema.minimum
        if schema.maximum is not None:
            doc["maximum"] = schema.maximum
    return doc


def validate_value(schema: SchemaNode, value: Any) -> list[Violation]:
    """Check a JSON value against a schema; empty list means it conforms.

    Violations are pure data with stable ordering (by path, then reason), so
    identical inputs always produce the identical list.
    """
    out: list[Violation] = []
    _validate(schema, value, "", out)
    out.sort(key=lambda v: (v.path, v.reason))
    return out


def _validate(schema: SchemaNode, value: Any, path: str, out: list[Violation]) -> None:
    kind = schema.kind
    if kind == "object":
        if not isinstance(value, dict):
            out.append(Violation(path, f"expected object, got {_type_name(value)}"))
            return
        declared = dict(schema.properties)
        for name in sorted(schema.required):
            if name not in value:
                out.append(Violation(path, f"missing required property {name!r}"))
        for name, sub in schema.properties:
            if name in value:
                _validate(sub, value[name], f"{path}/{name}", out)
        for name in value:
            if name not in declared:
                out.append(Violation(f"{path}/{name}", "unexpected property"))
    elif kind == "array":
        if not isinstance(value, list):
            out.append(Violation(path, f"expected array, got {_type_name(value)}"))
            return
        for i, item in enumerate(value):
            _validate(schema.items, item, f"{path}/{i}", out)
    elif kind == "string":
        if not isinstance(value, str):
            out.append(Violation(path, f"expected string, got {_type_name(value)}"))
            return
        if schema.min_length is not None and len(value) < schema.min_length:
            out.append(Violation(path, f"shorter than min_length {schema.min_length}"))
        if schema.max_length is not None and len(value) > schema.max_length:
            out.append(Violation(path, f"longer than max_length {schema.max_length}"))
    elif kind == "integer":
        if not _is_int(value):
            out.append(Violation(path, f"expected integer, got {_type_name(value)}"))
            return
        _check_bounds(schema, value, path, out)
    elif kind == "number":
        if not _is_number(value):
            out.append(Violation(path, f"expected number, got {_type_name(value)}"))
            return
        _check_bounds(schema, value, path, out)
    elif kind == "boolean":
        if not isinstance(value, bool):
            out.append(Violation(path, f"expected boolean, got {_type_name(value)}"))
    elif kind == "enum":
        if not any(_literal_eq(value, v) for v in schema.enum_values):
            out.append(Violation(path, f"not one of the allowed values: {value!r}"))


def _check_bounds(schema: SchemaNode, value: Any, path: str, out: list[Violation]) -> None:
    if schema.minimum is not None and value < schema.minimum:
        out.append(Violation(path, f"below minimum {schema.minimum}"))
    if schema.maximum is not None and value > schema.maximum:
        out.append(Violation(path, f"above maximum {schema.maximum}"))


def _opt_int(doc: dict, key: str, path: str) -> int | None:
    value = doc.get(key)
    if value is not None and not _is_int(value):
        raise SchemaError(path, f"{key} must be an integer")
    return value


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _literal_eq(a: Any, b: Any) -> bool:
    # Strict on type class so 1 never matches True and 1 never matches 1.0
    # (canonical serializations differ, and the grammar side is exact).
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    if _is_int(a) != _is_int(b):
        return False
    return type(a) is type(b) and a == b


def _type_name(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    return {str: "string", list: "array", dict: "object"}.get(type(value), type(value).__name__)


def generic_json(value: Any) -> str:
    """Schema-free compact serialization (sorted keys)."""
    return json.dumps(value, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def canonical_json(schema: SchemaNode, value: Any) -> str:
    """Serialize a value in the canonical form the compiled grammars accept.

    Object keys follow schema-declared order with no insignificant whitespace.
    The function is total: parts of the value that do not structurally match
    the schema fall back to a generic compact serialization, so invalid values
    still serialize faithfully (and are then rejected by the grammar).
    """
    if schema.kind == "object" and isinstance(value, dict):
        declared = dict(schema.properties)
        parts = [
            json.dumps(name, ensure_ascii=False) + ":" + canonical_json(sub, value[name])
            for name, sub in schema.properties
            if name in value
        ]
        parts += [
            json.dumps(name, ensure_ascii=False) + ":" + generic_json(value[name])
            for name in sorted(value)
            if name not in declared
        ]
        return "{" + ",".join(parts) + "}"
    if schema.kind == "array" and isinstance(value, list):
        return "[" + ",".join(canonical_json(schema.items, v) for v in value) + "]"
    return generic_json(value)
