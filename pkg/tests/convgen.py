"""Deterministic bulk conversation generator for traversal and masking tests.

Produces user-message scripts plus one scripted backend whose rules drive
them end to end: envelopes keyed on the exact user message, response texts
keyed on the exact serialized tool result.
"""
from __future__ import annotations

import json
from typing import Any

from flowagent.backends import ScriptedBackend, ScriptedRule
from flowagent.messages import ToolCall
from flowagent.tools import OCCASIONS, Catalog, execute_tool

EMOJI_REASON = (
    "\U0001f381 Fits the occasion you told me about\n"
    "\U0001f381 Inside the budget with room to spare\n"
    "\U0001f381 Loved by repeat gift senders"
)
EMOJI_BIRTHDAYS = (
    "\U0001f382 Here are the birthdays I found\n"
    "\U0001f381 Want me to pick a gift for one of them?"
)


def _result_key(result: Any) -> str:
    return json.dumps(result, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def build_scripted_suite(
    catalog: Catalog, registry_factory, count: int
) -> tuple[list[list[str]], ScriptedBackend]:
    """``count`` single-turn conversations plus the backend that drives them."""
    rules: dict[str, tuple[str | None, str]] = {}
    conversations: list[list[str]] = []

    def add_rule(key: str, output: str, node: str | None = None) -> None:
        if key in rules and rules[key][1] != output:
            raise AssertionError(f"conflicting rule for {key!r}")
        rules[key] = (node, output)

    def add_tool_conversation(user_text: str, call: ToolCall, response: str) -> None:
        # Fresh registry per conversation, matching how the suite is replayed
        # (purchase order ids restart per session).
        registry = registry_factory()
        violations = registry.argument_violations(call)
        assert not violations, f"generator produced invalid args: {violations}"
        add_rule(user_text, call.to_envelope(), node=None)
        result = execute_tool(registry, call)
        add_rule(_result_key(result), response, node=None)
        conversations.append([user_text])

    products = list(catalog.products)
    kinds = ["recommend", "search", "detail", "birthdays", "purchase", "chitchat"]
    chitchat = [
        ("How are you today number {i}?", "Doing great! \U0001f381 Ready to find gift {i}."),
        ("Any tips for choosing gifts? ({i})", "Think about the occasion and budget first. \U0001f381 ({i})"),
        ("Just saying thanks ({i})", "Anytime! \U0001f389 ({i})"),
    ]

    i = 0
    while len(conversations) < count:
        kind = kinds[i % len(kinds)]
        if kind == "recommend":
            occasion = OCCASIONS[i % len(OCCASIONS)]
            cap = 8000 + 3100 * (i % 37)
            call = ToolCall("recommend_gift", {"occasion": occasion, "price_max": cap})
            add_tool_conversation(
                f"Recommend a {occasion} gift, budget {cap} (case {i})", call, EMOJI_REASON
            )
        elif kind == "search":
            product = products[(i * 13) % len(products)]
            call = ToolCall(
                "search_products", {"query": product.title, "category": product.category}
            )
            add_tool_conversation(
                f"Search for {product.title} in {product.category} (case {i})", call, EMOJI_REASON
            )
        elif kind == "detail":
            product = products[(i * 29) % len(products)]
            call = ToolCall("get_product_detail", {"product_id": product.id})
            add_tool_conversation(
                f"Show details for {product.id} (case {i})", call, EMOJI_REASON
            )
        elif kind == "birthdays":
            month = 1 + (i % 12)
            call = ToolCall("get_friends_birthdays", {"month": month})
            add_tool_conversation(
                f"Who has a birthday in month {month}? (case {i})", call, EMOJI_BIRTHDAYS
            )
        elif kind == "purchase":
            product = products[(i * 7) % len(products)]
            recipient = ["Mina", "Jun", "Sora"][i % 3]
            call = ToolCall(
                "purchase_gift", {"product_id": product.id, "recipient": recipient}
            )
            add_tool_conversation(
                f"Please order {product.id} for {recipient} (case {i})",
                call,
                f"Done! \U0001f389 Your order for {recipient} is confirmed.",
            )
        else:
            template, reply = chitchat[i % len(chitchat)]
            text = template.format(i=i)
            add_rule(text, reply.format(i=i))
            conversations.append([text])
        i += 1

    backend = ScriptedBackend(
        rules=tuple(
            ScriptedRule(node=node, equals=key, outputs=(output,))
            for key, (node, output) in rules.items()
        ),
        default_output="Tell me the occasion and budget and I will help. \U0001f381",
    )
    return conversations, backend
