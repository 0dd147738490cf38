"""Tool registry and the deterministic mock shopping tool suite.

The catalog fixture is a desk-scale stand-in for a production product store:
a few hundred products across fixed categories, plus a friends list with
birthdays and gift history. Executors are pure functions of (catalog, args),
except purchase_gift which appends to a per-session ledger.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date
from functools import cached_property
from pathlib import Path
from typing import Any, Callable

from .messages import ToolCall
from .schema import SchemaNode, Violation, parse_schema, validate_value

CATEGORIES = ("wine", "chocolate", "flowers", "beauty", "tech", "home", "fashion", "books")
OCCASIONS = ("birthday", "anniversary", "wedding", "housewarming", "graduation")


class ToolError(Exception):
    pass


class UnknownToolError(ToolError):
    pass


class ToolArgumentError(ToolError):
    """Arguments rejected before execution; carries the violations."""

    def __init__(self, tool_name: str, violations: list[Violation]):
        self.tool_name = tool_name
        self.violations = violations
        detail = "; ".join(str(v) for v in violations)
        super().__init__(f"invalid arguments for {tool_name}: {detail}")


class ToolExecutionError(ToolError):
    """Executor failed; carries the tool name."""

    def __init__(self, tool_name: str, reason: str):
        self.tool_name = tool_name
        super().__init__(f"{tool_name}: {reason}")


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    input_schema: SchemaNode
    output_schema: SchemaNode
    executor: Callable[[dict], Any]
    check_args: Callable[[dict], list[Violation]] = lambda args: []


@dataclass
class ToolRegistry:
    specs: dict[str, ToolSpec] = field(default_factory=dict)

    def register(self, spec: ToolSpec) -> None:
        if spec.name in self.specs:
            raise ValueError(f"tool {spec.name!r} already registered")
        self.specs[spec.name] = spec

    def get(self, name: str) -> ToolSpec:
        try:
            return self.specs[name]
        except KeyError:
            raise UnknownToolError(f"unknown tool {name!r}") from None

    def names(self) -> list[str]:
        return sorted(self.specs)

    def argument_violations(self, call: ToolCall) -> list[Violation]:
        """Schema check plus tool-specific argument rules (the engine's gate)."""
        spec = self.get(call.name)
        if not isinstance(call.arguments, dict):
            return [Violation("", "arguments must be an object")]
        violations = validate_value(spec.input_schema, call.arguments)
        if not violations:
            violations = spec.check_args(call.arguments)
        return violations


def execute_tool(registry: ToolRegistry, call: ToolCall) -> Any:
    """Run a registered tool; output is asserted against the output schema."""
    spec = registry.get(call.name)
    violations = registry.argument_violations(call)
    if violations:
        raise ToolArgumentError(call.name, violations)
    try:
        result = spec.executor(call.arguments)
    except ToolError:
        raise
    except Exception as err:
        raise ToolExecutionError(call.name, str(err)) from err
    bad_output = validate_value(spec.output_schema, result)
    if bad_output:
        raise ToolExecutionError(
            call.name, f"output violates its schema: {'; '.join(str(v) for v in bad_output)}"
        )
    return result


# --------------------------------------------------------------------------
# Catalog fixture
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Product:
    id: str
    title: str
    price: int
    category: str
    tags: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "price": self.price,
            "category": self.category,
            "tags": list(self.tags),
        }


@dataclass(frozen=True)
class Friend:
    name: str
    birthday: str
    gift_history: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"name": self.name, "birthday": self.birthday, "gift_history": list(self.gift_history)}


@dataclass(frozen=True)
class Catalog:
    products: tuple[Product, ...]
    friends: tuple[Friend, ...]

    def product(self, product_id: str) -> Product | None:
        return self._by_id.get(product_id)

    @cached_property
    def _by_id(self) -> dict[str, Product]:
        return {p.id: p for p in self.products}


def load_catalog(source: str | Path | dict) -> Catalog:
    """Load and check a catalog fixture (ids unique, prices positive, dates valid)."""
    if isinstance(source, dict):
        doc = source
    else:
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    products = tuple(
        Product(
            id=p["id"],
            title=p["title"],
            price=p["price"],
            category=p["category"],
            tags=tuple(p["tags"]),
        )
        for p in doc["products"]
    )
    friends = tuple(
        Friend(name=f["name"], birthday=f["birthday"], gift_history=tuple(f["gift_history"]))
        for f in doc["friends"]
    )
    ids = [p.id for p in products]
    if len(set(ids)) != len(ids):
        raise ValueError("catalog product ids must be unique")
    for p in products:
        if not isinstance(p.price, int) or p.price <= 0:
            raise ValueError(f"product {p.id}: price must be a positive integer")
        if p.category not in CATEGORIES:
            raise ValueError(f"product {p.id}: unknown category {p.category!r}")
    known = set(ids)
    for f in friends:
        date.fromisoformat(f.birthday)
        for gid in f.gift_history:
            if gid not in known:
                raise ValueError(f"friend {f.name}: gift history references unknown product {gid!r}")
    return Catalog(products=products, friends=friends)


# --------------------------------------------------------------------------
# Tool schemas (shared with the bundled graph fixture)
# --------------------------------------------------------------------------

_PRODUCT_SCHEMA = {
    "type": "object",
    "properties": {
        "id": {"type": "string", "min_length": 1},
        "title": {"type": "string", "min_length": 1},
        "price": {"type": "integer", "minimum": 1},
        "category": {"enum": list(CATEGORIES)},
        "tags": {"type": "array", "items": {"type": "string", "min_length": 1}},
    },
    "required": ["id", "title", "price", "category", "tags"],
}

TOOL_SCHEMA_DOCS: dict[str, dict[str, dict]] = {
    "search_products": {
        "input": {
            "type": "object",
            "properties": {
                "query": {"type": "string", "min_length": 1, "max_length": 100},
                "category": {"enum": list(CATEGORIES)},
                "price_min": {"type": "integer", "minimum": 1},
                "price_max": {"type": "integer", "minimum": 1},
                "limit": {"type": "integer", "minimum": 1, "maximum": 20},
            },
            "required": ["query"],
        },
        "output": {
            "type": "object",
            "properties": {"products": {"type": "array", "items": _PRODUCT_SCHEMA}},
            "required": ["products"],
        },
    },
    "recommend_gift": {
        "input": {
            "type": "object",
            "properties": {
                "occasion": {"enum": list(OCCASIONS)},
                "recipient": {"type": "string", "min_length": 1, "max_length": 50},
                "price_min": {"type": "integer", "minimum": 1},
                "price_max": {"type": "integer", "minimum": 1},
                "tags": {"type": "array", "items": {"type": "string", "min_length": 1}},
            },
            "required": ["occasion"],
        },
        "output": {
            "type": "object",
            "properties": {"products": {"type": "array", "items": _PRODUCT_SCHEMA}},
            "required": ["products"],
        },
    },
    "get_product_detail": {
        "input": {
            "type": "object",
            "properties": {"product_id": {"type": "string", "min_length": 1}},
            "required": ["product_id"],
        },
        "output": {
            "type": "object",
            "properties": {
                "id": {"type": "string", "min_length": 1},
                "title": {"type": "string", "min_length": 1},
                "price": {"type": "integer", "minimum": 1},
                "category": {"enum": list(CATEGORIES)},
                "tags": {"type": "array", "items": {"type": "string", "min_length": 1}},
                "brand_story": {"type": "string", "min_length": 1},
                "description": {"type": "string", "min_length": 1},
            },
            "required": ["id", "title", "price", "category", "tags", "brand_story", "description"],
        },
    },
    "purchase_gift": {
        "input": {
            "type": "object",
            "properties": {
                "product_id": {"type": "string", "min_length": 1},
                "recipient": {"type": "string", "min_length": 1, "max_length": 50},
                "quantity": {"type": "integer", "minimum": 1, "maximum": 10},
            },
            "required": ["product_id", "recipient"],
        },
        "output": {
            "type": "object",
            "properties": {
                "order_id": {"type": "string", "min_length": 1},
                "product_id": {"type": "string", "min_length": 1},
                "title": {"type": "string", "min_length": 1},
                "recipient": {"type": "string", "min_length": 1},
                "quantity": {"type": "integer", "minimum": 1},
                "price_total": {"type": "integer", "minimum": 1},
            },
            "required": ["order_id", "product_id", "title", "recipient", "quantity", "price_total"],
        },
    },
    "get_friends_birthdays": {
        "input": {
            "type": "object",
            "properties": {"month": {"type": "integer", "minimum": 1, "maximum": 12}},
            "required": ["month"],
        },
        "output": {
            "type": "object",
            "properties": {
                "friends": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "name": {"type": "string", "min_length": 1},
                            "birthday": {"type": "string", "min_length": 10, "max_length": 10},
                            "gift_history": {
                                "type": "array",
                                "items": {"type": "string", "min_length": 1},
                            },
                        },
                        "required": ["name", "birthday", "gift_history"],
                    },
                }
            },
            "required": ["friends"],
        },
    },
}

TOOL_DESCRIPTIONS = {
    "search_products": "Search the product catalog by free-text query with optional category and price filters.",
    "recommend_gift": "Recommend up to five gift products for an occasion, optionally bounded by price and tags.",
    "get_product_detail": "Fetch the full detail card for one product, including its brand story.",
    "purchase_gift": "Order a product for a recipient and return the order confirmation.",
    "get_friends_birthdays": "List friends whose birthday falls in the given month, with their gift history.",
}


def _price_range_violations(args: dict) -> list[Violation]:
    # A degenerate range is treated like a schema violation so the engine's
    # retry path can ask the model for a usable one.
    lo, hi = args.get("price_min"), args.get("price_max")
    out: list[Violation] = []
    if lo is not None and hi is not None:
        if lo == hi:
            out.append(Violation("/price_min", "price range start must differ from its end"))
        elif lo > hi:
            out.append(Violation("/price_min", "price range start exceeds its end"))
    return out


def _within_price(product: Product, lo: int | None, hi: int | None) -> bool:
    if lo is not None and product.price < lo:
        return False
    if hi is not None and product.price > hi:
        return False
    return True


def build_registry(catalog: Catalog, purchase_ledger: list | None = None) -> ToolRegistry:
    """Standard five-tool registry over a catalog.

    ``purchase_ledger`` is the per-session order log; pass a fresh list per
    session (a shared default would leak orders across sessions).
    """
    ledger = purchase_ledger if purchase_ledger is not None else []
    registry = ToolRegistry()

    def search_products(args: dict) -> Any:
        tokens = [t for t in args["query"].lower().split() if t]
        limit = args.get("limit", 5)
        scored = []
        for p in catalog.products:
            if args.get("category") and p.category != args["category"]:
                continue
            if not _within_price(p, args.get("price_min"), args.get("price_max")):
                continue
            haystack = set(p.title.lower().split()) | set(p.tags) | {p.category}
            score = sum(1 for t in tokens if t in haystack)
            if score > 0:
                scored.append((-score, p.id, p))
        scored.sort()
        return {"products": [p.to_dict() for _, _, p in scored[:limit]]}

    def recommend_gift(args: dict) -> Any:
        wanted = {args["occasion"], *args.get("tags", [])}
        lo, hi = args.get("price_min"), args.get("price_max")
        target = None
        if lo is not None and hi is not None:
            target = (lo + hi) // 2
        elif lo is not None:
            target = lo
        elif hi is not None:
            target = hi
        scored = []
        for p in catalog.products:
            if not _within_price(p, lo, hi):
                continue
            overlap = len(wanted & set(p.tags))
            if overlap == 0:
                continue
            distance = abs(p.price - target) if target is not None else 0
            scored.append((-overlap, distance, p.id, p))
        scored.sort()
        return {"products": [p.to_dict() for _, _, _, p in scored[:5]]}

    def get_product_detail(args: dict) -> Any:
        product = catalog.product(args["product_id"])
        if product is None:
            raise ToolExecutionError("get_product_detail", "product not found")
        return {
            **product.to_dict(),
            "brand_story": (
                f"{product.title} comes from a small {product.category} house that has "
                f"refined its craft for decades."
            ),
            "description": (
                f"{product.title} — a {product.category} pick tagged "
                f"{', '.join(product.tags)}, priced at {product.price}."
            ),
        }

    def purchase_gift(args: dict) -> Any:
        product = catalog.product(args["product_id"])
        if product is None:
            raise ToolExecutionError("purchase_gift", "product not found")
        quantity = args.get("quantity", 1)
        order = {
            "order_id": f"order-{len(ledger) + 1:04d}",
            "product_id": product.id,
            "title": product.title,
            "recipient": args["recipient"],
            "quantity": quantity,
            "price_total": product.price * quantity,
        }
        ledger.append(order)
        return order

    def get_friends_birthdays(args: dict) -> Any:
        month = args["month"]
        rows = [
            f.to_dict()
            for f in catalog.friends
            if date.fromisoformat(f.birthday).month == month
        ]
        rows.sort(key=lambda r: (r["birthday"], r["name"]))
        return {"friends": rows}

    executors: dict[str, Callable[[dict], Any]] = {
        "search_products": search_products,
        "recommend_gift": recommend_gift,
        "get_product_detail": get_product_detail,
        "purchase_gift": purchase_gift,
        "get_friends_birthdays": get_friends_birthdays,
    }
    range_checked = {"search_products", "recommend_gift"}
    for name, executor in executors.items():
        registry.register(
            ToolSpec(
                name=name,
                description=TOOL_DESCRIPTIONS[name],
                input_schema=parse_schema(TOOL_SCHEMA_DOCS[name]["input"]),
                output_schema=parse_schema(TOOL_SCHEMA_DOCS[name]["output"]),
                executor=executor,
                check_args=_price_range_violations if name in range_checked else (lambda args: []),
            )
        )
    return registry
