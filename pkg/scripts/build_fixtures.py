#!/usr/bin/env python3
"""Regenerate the bundled fixtures and golden files.

Everything here is deterministic: running it twice produces identical bytes.
Outputs land in src/flowagent/fixtures/ (shipped with the package) and
tests/fixtures/golden/ (regression anchors).
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from flowagent.backends import BackendRequest, DecodeParams, ScriptedBackend, render_backend_request
from flowagent.engine import Limits, run_turn
from flowagent.evaluation import render_accuracy_payload, render_quality_payload, tools_description
from flowagent.graph import load_graph
from flowagent.messages import Message, ToolCall, user_message
from flowagent.tools import (
    CATEGORIES,
    OCCASIONS,
    TOOL_SCHEMA_DOCS,
    build_registry,
    execute_tool,
    load_catalog,
)

FIXTURES = ROOT / "src" / "flowagent" / "fixtures"
GOLDEN = ROOT / "tests" / "fixtures" / "golden"

ADJECTIVES = {
    "wine": ["Velvet", "Reserve", "Sunset", "Old Vine", "Harvest"],
    "chocolate": ["Dark", "Hazelnut", "Salted", "Velour", "Praline"],
    "flowers": ["Blush", "Garden", "Midnight", "Paper", "Wild"],
    "beauty": ["Silk", "Dew", "Calm", "Glow", "Petal"],
    "tech": ["Pocket", "Aurora", "Quiet", "Swift", "Nimbus"],
    "home": ["Cozy", "Linen", "Amber", "Nordic", "Clay"],
    "fashion": ["Woven", "Slate", "Breeze", "Ivory", "Denim"],
    "books": ["Pocketful", "Annotated", "Illustrated", "Collected", "Evening"],
}
NOUNS = {
    "wine": ["Shiraz", "Pinot Noir", "Riesling", "Port", "Prosecco"],
    "chocolate": ["Truffle Box", "Bar Trio", "Bonbon Set", "Ganache Tin", "Tasting Flight"],
    "flowers": ["Rose Bouquet", "Tulip Bundle", "Peony Jar", "Orchid Pot", "Dried Wreath"],
    "beauty": ["Hand Cream", "Bath Set", "Face Mist", "Balm Duo", "Soap Stack"],
    "tech": ["Speaker", "Lamp", "Tracker", "Frame", "Charger"],
    "home": ["Candle", "Throw Blanket", "Mug Pair", "Diffuser", "Planter"],
    "fashion": ["Scarf", "Beanie", "Tote", "Socks Set", "Gloves"],
    "books": ["Poetry", "Atlas", "Cookbook", "Essays", "Short Stories"],
}
FLAVOR_TAGS = {
    "wine": "cellar",
    "chocolate": "sweet",
    "flowers": "fresh",
    "beauty": "pamper",
    "tech": "gadget",
    "home": "cozy",
    "fashion": "wearable",
    "books": "reader",
}

FRIENDS = [
    ("Mina", "2001-06-11"),
    ("Jisoo", "1999-06-24"),
    ("Hana", "2000-01-15"),
    ("Minho", "1998-03-08"),
    ("Sora", "2002-12-01"),
    ("Jun", "1997-07-19"),
    ("Yuna", "2003-09-05"),
    ("Taeyang", "1996-12-28"),
    ("Bora", "2001-04-22"),
    ("Dain", "1999-10-30"),
]

CHAT_PROMPT = """\
You are Gift Mate, a shopping assistant for finding and sending gifts.
Decide each turn whether to call a tool or answer directly. When a tool is
needed, reply with exactly one envelope and nothing else:
<tool_call>{"name":"<tool_name>","arguments":{...}}</tool_call>
Available tools: search_products, recommend_gift, get_product_detail,
purchase_gift, get_friends_birthdays. Extract every argument from the
conversation; never invent product ids. Price ranges must come from the user
and must not start and end at the same value. For questions outside shopping,
answer briefly and steer the user back to gifts. Keep answers under 500
characters, never use dash bullets, and do not repeat tool result cards."""

RECOMMEND_REASON_PROMPT = """\
You explain gift recommendations. Ground every statement in the tool results
already in the conversation; never invent products or prices. Reply with at
most five short lines, each starting with an emoji bullet such as \U0001f381.
The user already sees the product cards, so mention at most one product by
name. Keep the whole reply under 500 characters."""

FRIENDS_MESSAGE_PROMPT = """\
You summarize friends' birthdays from the tool results. Write one line per
friend, each starting with an emoji bullet \U0001f382 and mentioning the date.
Never mention friends that are absent from the tool results. Finish with one
emoji line inviting the user to pick a gift. Keep it under 500 characters."""

PURCHASE_MESSAGE_PROMPT = """\
You confirm completed purchases. The history you see is only the purchase
information from the last tool result. State the ordered product, recipient
and total in one warm sentence with one emoji, then add one short sentence
about delivery. No bullets, under 300 characters."""


def build_catalog() -> dict:
    products = []
    index = 0
    for category in CATEGORIES:
        for noun in NOUNS[category]:
            for adjective in ADJECTIVES[category]:
                occasion = OCCASIONS[index % len(OCCASIONS)]
                products.append(
                    {
                        "id": f"{category[:2]}-{index:03d}",
                        "title": f"{adjective} {noun}",
                        "price": 3200 + 741 * index,
                        "category": category,
                        "tags": [occasion, FLAVOR_TAGS[category], category],
                    }
                )
                index += 1
    product_ids = [p["id"] for p in products]
    friends = []
    for i, (name, birthday) in enumerate(FRIENDS):
        history = [product_ids[(i * 37 + k * 11) % len(product_ids)] for k in range(i % 4)]
        friends.append({"name": name, "birthday": birthday, "gift_history": history})
    return {"products": products, "friends": friends}


def build_graph_doc() -> dict:
    schemas = {}
    for tool, docs in TOOL_SCHEMA_DOCS.items():
        schemas[f"{tool}_input"] = docs["input"]
        schemas[f"{tool}_output"] = docs["output"]
    tool_nodes = {
        "search_products": "recommend_reason",
        "recommend_gift": "recommend_reason",
        "get_product_detail": "recommend_reason",
        "get_friends_birthdays": "friends_message",
        "purchase_gift": "purchase_message",
    }
    nodes = {
        "chat": {
            "type": "llm",
            "system_prompt": CHAT_PROMPT,
            "history_policy": ["keep_all"],
            "allowed_tools": sorted(tool_nodes),
            "default_successor": "final",
            "output_mode": "free_text",
            "format_profile_ref": "chat",
        },
        "recommend_reason": {
            "type": "llm",
            "system_prompt": RECOMMEND_REASON_PROMPT,
            "history_policy": ["keep_all"],
            "allowed_tools": [],
            "default_successor": "final",
            "output_mode": "free_text",
            "format_profile_ref": "emoji_list",
        },
        "friends_message": {
            "type": "llm",
            "system_prompt": FRIENDS_MESSAGE_PROMPT,
            "history_policy": ["keep_all"],
            "allowed_tools": [],
            "default_successor": "final",
            "output_mode": "free_text",
            "format_profile_ref": "emoji_list",
        },
        "purchase_message": {
            "type": "llm",
            "system_prompt": PURCHASE_MESSAGE_PROMPT,
            "history_policy": ["keep_only_last_tool_result"],
            "allowed_tools": [],
            "default_successor": "final",
            "output_mode": "free_text",
            "format_profile_ref": "chat",
        },
        "final": {"type": "final"},
    }
    edges = [["chat", "final"]]
    for tool, successor in sorted(tool_nodes.items()):
        nodes[tool] = {
            "type": "tool",
            "tool_name": tool,
            "input_schema": f"{tool}_input",
            "output_schema": f"{tool}_output",
            "successor": successor,
        }
        edges.append(["chat", tool])
        edges.append([tool, successor])
    edges += [["recommend_reason", "final"], ["friends_message", "final"], ["purchase_message", "final"]]
    return {
        "nodes": nodes,
        "edges": sorted(edges),
        "entry": "chat",
        "final": "final",
        "schemas": schemas,
    }


def envelope(name: str, arguments: dict) -> str:
    return ToolCall(name=name, arguments=arguments).to_envelope()


def build_demo_backend(catalog, registry) -> tuple[dict, dict]:
    """Scripted backend driving the bundled three-turn demo session."""
    birthday = sorted(
        (p for p in catalog.products if "birthday" in p.tags), key=lambda p: p.price
    )
    price_cap = birthday[2].price  # exactly three birthday products fit under it
    recommend_args = {"occasion": "birthday", "price_max": price_cap}
    shortlist = execute_tool(registry, ToolCall("recommend_gift", recommend_args))["products"]
    assert len(shortlist) == 3, f"expected 3 shortlisted products, got {len(shortlist)}"
    second = shortlist[1]

    rules = [
        {
            "node": "chat",
            "contains": "birthday gift",
            "output": envelope("recommend_gift", recommend_args),
        },
        {
            "node": "chat",
            "contains": "more about the second",
            "output": envelope("get_product_detail", {"product_id": second["id"]}),
        },
        {
            "node": "chat",
            "contains": "Buy it for Mina",
            "output": envelope(
                "purchase_gift", {"product_id": second["id"], "recipient": "Mina"}
            ),
        },
        {
            "node": "chat",
            "contains": "birthdays in June",
            "output": envelope("get_friends_birthdays", {"month": 6}),
        },
        # Retry exercise: a degenerate price range, twice, then a usable one.
        {
            "node": "chat",
            "contains": "mystery box",
            "output": envelope(
                "recommend_gift",
                {"occasion": "birthday", "price_min": 5000, "price_max": 5000},
            ),
        },
        {
            "node": "chat",
            "contains": "(attempt 1)",
            "output": envelope(
                "recommend_gift",
                {"occasion": "birthday", "price_min": 5000, "price_max": 5000},
            ),
        },
        {
            "node": "chat",
            "contains": "(attempt 2)",
            "output": envelope(
                "recommend_gift",
                {"occasion": "birthday", "price_min": 5000, "price_max": 40000},
            ),
        },
        {
            "node": "recommend_reason",
            "contains": '"brand_story"',
            "output": (
                "\U0001f381 The maker's story is half the charm of this one\n"
                "\U0001f381 Crafted in small batches for decades\n"
                "\U0001f381 A safe pick that still feels personal"
            ),
        },
        {
            "node": "recommend_reason",
            "output": (
                "\U0001f381 A sweet classic that fits the budget\n"
                "\U0001f381 Warm and personal for a close friend\n"
                "\U0001f381 An easy win if you are unsure of taste"
            ),
        },
        {
            "node": "friends_message",
            "output": (
                "\U0001f382 Mina celebrates on 06-11\n"
                "\U0001f382 Jisoo celebrates on 06-24\n"
                "\U0001f381 Want me to find them a gift?"
            ),
        },
        {
            "node": "purchase_message",
            "output": (
                f"Your gift is on its way! \U0001f389 {second['title']} will reach Mina "
                "within two days."
            ),
        },
    ]
    backend_doc = {
        "rules": rules,
        "default_output": "Happy to help with gifts! Tell me the occasion and budget. \U0001f381",
    }
    session_doc = {
        "turns": [
            f"I need a birthday gift for my friend, budget about {price_cap} won",
            "Tell me more about the second one",
            "Buy it for Mina please",
        ],
        "recommended_ids": [p["id"] for p in shortlist],
        "detail_product_id": second["id"],
    }
    return backend_doc, session_doc


def _result_json(result) -> str:
    return json.dumps(result, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def build_eval_fixture(catalog, registry) -> tuple[dict, dict]:
    """Twenty labeled turns with known scores: 17 accurate, 19 format-clean,
    quality 3 everywhere except two paraphrase turns scored 2."""
    products = list(catalog.products)
    d1 = products[10]
    d2 = products[55]

    def call(name, args):
        return {"name": name, "arguments": args}

    emoji_reason = (
        "\U0001f381 Matches the occasion you mentioned\n"
        "\U0001f381 Sits comfortably inside the budget\n"
        "\U0001f381 A crowd-pleaser with repeat buyers"
    )
    birthday_lines = (
        "\U0001f382 Mina celebrates on 06-11\n"
        "\U0001f382 Jisoo celebrates on 06-24\n"
        "\U0001f381 Shall I pick a gift for one of them?"
    )
    december_lines = (
        "\U0001f382 Sora celebrates on 12-01\n"
        "\U0001f382 Taeyang celebrates on 12-28\n"
        "\U0001f381 Shall I pick a gift for one of them?"
    )
    purchase_line = f"Order placed! \U0001f389 {d2.title} is on its way to Jisoo."

    turns = [
        # 1-10: the agent mirrors the reference call exactly.
        {
            "id": "t01",
            "user_message": "Need a birthday gift under 30000 for my coworker",
            "reference_call": call("recommend_gift", {"occasion": "birthday", "price_max": 30000}),
            "actual_call": call("recommend_gift", {"occasion": "birthday", "price_max": 30000}),
            "response": emoji_reason,
            "reference_response": emoji_reason,
            "profile": "emoji_list",
        },
        {
            "id": "t02",
            "user_message": "Wedding anniversary present between 50000 and 120000",
            "reference_call": call(
                "recommend_gift",
                {"occasion": "anniversary", "price_min": 50000, "price_max": 120000},
            ),
            "actual_call": call(
                "recommend_gift",
                {"occasion": "anniversary", "price_min": 50000, "price_max": 120000},
            ),
            "response": emoji_reason,
            "reference_response": emoji_reason,
            "profile": "emoji_list",
        },
        {
            "id": "t03",
            "user_message": "Show me velvet shiraz wine options",
            "reference_call": call("search_products", {"query": "Velvet Shiraz", "category": "wine"}),
            "actual_call": call("search_products", {"query": "Velvet Shiraz", "category": "wine"}),
            "response": emoji_reason,
            "reference_response": emoji_reason,
            "profile": "emoji_list",
        },
        {
            "id": "t04",
            "user_message": "Find a hazelnut truffle box",
            "reference_call": call("search_products", {"query": "Hazelnut Truffle Box"}),
            "actual_call": call("search_products", {"query": "Hazelnut Truffle Box"}),
            "response": emoji_reason,
            "reference_response": emoji_reason,
            "profile": "emoji_list",
        },
        {
            "id": "t05",
            "user_message": f"What can you tell me about product {d1.id}?",
            "reference_call": call("get_product_detail", {"product_id": d1.id}),
            "actual_call": call("get_product_detail", {"product_id": d1.id}),
            "response": emoji_reason,
            "reference_response": emoji_reason,
            "profile": "emoji_list",
        },
        {
            "id": "t06",
            "user_message": f"Order product {d2.id} for Jisoo",
            "reference_call": call("purchase_gift", {"product_id": d2.id, "recipient": "Jisoo"}),
            "actual_call": call("purchase_gift", {"product_id": d2.id, "recipient": "Jisoo"}),
            "response": purchase_line,
            "reference_response": purchase_line,
            "profile": "chat",
        },
        {
            "id": "t07",
            "user_message": "Whose birthdays are in June?",
            "reference_call": call("get_friends_birthdays", {"month": 6}),
            "actual_call": call("get_friends_birthdays", {"month": 6}),
            "response": birthday_lines,
            "reference_response": birthday_lines,
            "profile": "emoji_list",
        },
        {
            "id": "t08",
            "user_message": "Which friends have December birthdays?",
            "reference_call": call("get_friends_birthdays", {"month": 12}),
            "actual_call": call("get_friends_birthdays", {"month": 12}),
            "response": december_lines,
            "reference_response": december_lines,
            "profile": "emoji_list",
        },
        {
            "id": "t09",
            "user_message": "Housewarming gift ideas please",
            "reference_call": call("recommend_gift", {"occasion": "housewarming"}),
            "actual_call": call("recommend_gift", {"occasion": "housewarming"}),
            "response": emoji_reason,
            "reference_response": emoji_reason,
            "profile": "emoji_list",
        },
        {
            "id": "t10",
            "user_message": "Looking for a cozy candle for the home",
            "reference_call": call("search_products", {"query": "cozy candle", "category": "home"}),
            "actual_call": call("search_products", {"query": "cozy candle", "category": "home"}),
            "response": emoji_reason,
            "reference_response": emoji_reason,
            "profile": "emoji_list",
        },
        # 11-13: wrong tool, missing arguments, wrong argument value.
        {
            "id": "t11",
            "user_message": "Recommend a graduation gift around 40000 to 60000",
            "reference_call": call(
                "recommend_gift",
                {"occasion": "graduation", "price_min": 40000, "price_max": 60000},
            ),
            "actual_call": call(
                "search_products",
                {"query": "graduation gift", "price_min": 40000, "price_max": 60000},
            ),
            "response": emoji_reason,
            "reference_response": emoji_reason,
            "profile": "emoji_list",
        },
        {
            "id": "t12",
            "user_message": "Anniversary flowers between 20000 and 70000 please",
            "reference_call": call(
                "recommend_gift",
                {"occasion": "anniversary", "price_min": 20000, "price_max": 70000},
            ),
            "actual_call": call("recommend_gift", {"occasion": "anniversary"}),
            "response": emoji_reason,
            "reference_response": emoji_reason,
            "profile": "emoji_list",
        },
        {
            "id": "t13",
            "user_message": "Whose birthdays are in March?",
            "reference_call": call("get_friends_birthdays", {"month": 3}),
            "actual_call": call("get_friends_birthdays", {"month": 7}),
            "response": birthday_lines,
            "reference_response": birthday_lines,
            "profile": "emoji_list",
        },
        # 14-18: plain chat turns answered exactly like the reference.
        {
            "id": "t14",
            "user_message": "Hello there!",
            "reference_call": None,
            "actual_call": None,
            "response": "Hi! \U0001f44b Tell me the occasion and budget and I will find a gift.",
            "reference_response": "Hi! \U0001f44b Tell me the occasion and budget and I will find a gift.",
            "profile": "chat",
        },
        {
            "id": "t15",
            "user_message": "What can you do?",
            "reference_call": None,
            "actual_call": None,
            "response": "I search products, recommend gifts, check friends' birthdays and place orders. \U0001f381",
            "reference_response": "I search products, recommend gifts, check friends' birthdays and place orders. \U0001f381",
            "profile": "chat",
        },
        {
            "id": "t16",
            "user_message": "Thanks a lot!",
            "reference_call": None,
            "actual_call": None,
            "response": "Anytime! \U0001f381 Come back when you need another gift.",
            "reference_response": "Anytime! \U0001f381 Come back when you need another gift.",
            "profile": "chat",
        },
        {
            "id": "t17",
            "user_message": "Do you sell cars?",
            "reference_call": None,
            "actual_call": None,
            "response": "Cars are outside my shop, but I can find a great gift for any occasion. \U0001f381",
            "reference_response": "Cars are outside my shop, but I can find a great gift for any occasion. \U0001f381",
            "profile": "chat",
        },
        {
            "id": "t18",
            "user_message": "Good morning",
            "reference_call": None,
            "actual_call": None,
            "response": "Good morning! ☀️ Shopping for someone special today?",
            "reference_response": "Good morning! ☀️ Shopping for someone special today?",
            "profile": "chat",
        },
        # 19-20: paraphrases; 20 also breaks the format rules.
        {
            "id": "t19",
            "user_message": "Can you wrap gifts too?",
            "reference_call": None,
            "actual_call": None,
            "response": "Every order includes gift wrapping at no extra cost.",
            "reference_response": "Gift wrapping is included with every order at no extra cost.",
            "profile": "chat",
        },
        {
            "id": "t20",
            "user_message": "Which occasions do you cover?",
            "reference_call": None,
            "actual_call": None,
            "response": (
                "We cover birthdays, anniversaries, weddings, housewarmings and graduations. "
                "\U0001f389\n- plus seasonal events"
            ),
            "reference_response": (
                "We cover birthdays, anniversaries, weddings, housewarmings and graduations. "
                "\U0001f389"
            ),
            "profile": "chat",
        },
    ]

    rules = []
    seen: dict[str, str] = {}

    def add_rule(matcher_value: str, output: str) -> None:
        if matcher_value in seen:
            if seen[matcher_value] != output:
                raise SystemExit(f"conflicting scripted rule for {matcher_value!r}")
            return
        seen[matcher_value] = output
        rules.append({"equals": matcher_value, "output": output})

    for turn in turns:
        actual = turn.pop("actual_call")
        response = turn.pop("response")
        if actual is None:
            add_rule(turn["user_message"], response)
        else:
            add_rule(turn["user_message"], envelope(actual["name"], actual["arguments"]))
            result = execute_tool(registry, ToolCall(actual["name"], actual["arguments"]))
            add_rule(_result_json(result), response)

    agent_backend = {"rules": rules, "default_output": "I am not sure, could you rephrase? \U0001f381"}
    return {"turns": turns}, agent_backend


def build_config_example() -> dict:
    return {
        "graph": "graph_gift_shop.json",
        "catalog": "catalog.json",
        "backend": {"type": "scripted", "fixture": "scripted_backend_gift.json"},
        "judge_backend": {"type": "rubric"},
        "format_profiles": {
            "chat": {
                "rules": [
                    {"kind": "max_chars", "max": 500},
                    {"kind": "forbidden_pattern", "pattern": "(?m)^- ", "label": "dash bullets"},
                ]
            },
            "emoji_list": {
                "rules": [
                    {"kind": "max_chars", "max": 500},
                    {"kind": "line_prefix_emoji"},
                    {"kind": "no_duplicate_of_tool_cards", "max_title_mentions": 1},
                ]
            },
        },
        "limits": {"max_retries": 3, "turn_budget_s": 60.0},
        "auth_token": "desk-token",
        "store_dir": "var/store",
        "export_dir": "var/export",
        "session_busy_policy": "queue",
    }


def write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n", "utf-8")
    print(f"wrote {path.relative_to(ROOT)}")


def build_goldens(graph, catalog, backend_doc, session_doc, eval_doc) -> None:
    backend = ScriptedBackend.from_dict(backend_doc)
    ledger: list = []
    registry = build_registry(catalog, ledger)
    history: list[Message] = []
    traces = []
    for turn_index, text in enumerate(session_doc["turns"]):
        result = run_turn(
            graph, history, user_message(text), backend, registry, Limits.for_graph(graph), turn_index
        )
        history = result.updated_history
        traces.append(result.trace.to_dict())
    write_json(GOLDEN / "demo_session_traces.json", traces)

    registry = build_registry(catalog, [])
    turn = eval_doc["turns"][0]
    reference_call = ToolCall(
        turn["reference_call"]["name"], turn["reference_call"]["arguments"]
    )
    payload = render_accuracy_payload(
        tools_description(registry),
        [user_message(turn["user_message"])],
        reference_call,
        reference_call,
    )
    (GOLDEN / "judge_accuracy_payload.txt").write_text(payload + "\n", "utf-8")
    print(f"wrote {(GOLDEN / 'judge_accuracy_payload.txt').relative_to(ROOT)}")
    quality_payload = render_quality_payload(
        [user_message(turn["user_message"])],
        turn["reference_response"],
        turn["reference_response"],
    )
    (GOLDEN / "judge_quality_payload.txt").write_text(quality_payload + "\n", "utf-8")
    print(f"wrote {(GOLDEN / 'judge_quality_payload.txt').relative_to(ROOT)}")

    request = BackendRequest(
        system_prompt="You route gift requests.",
        messages=(
            user_message("anniversary gift between 50000 and 120000"),
            Message(role="assistant", content="Let me check.", origin_node="chat"),
        ),
        constraint=None,
        decode_params=DecodeParams(temperature=0.0, max_output_chars=800),
    )
    write_json(GOLDEN / "http_request.json", render_backend_request(request, model="desk-model"))


def main() -> None:
    catalog_doc = build_catalog()
    write_json(FIXTURES / "catalog.json", catalog_doc)
    catalog = load_catalog(catalog_doc)

    graph_doc = build_graph_doc()
    write_json(FIXTURES / "graph_gift_shop.json", graph_doc)
    graph = load_graph(graph_doc)

    registry = build_registry(catalog, [])
    backend_doc, session_doc = build_demo_backend(catalog, registry)
    write_json(FIXTURES / "scripted_backend_gift.json", backend_doc)
    write_json(FIXTURES / "demo_session.json", session_doc)

    eval_doc, agent_backend = build_eval_fixture(catalog, build_registry(catalog, []))
    write_json(FIXTURES / "eval_turns.json", eval_doc)
    write_json(FIXTURES / "eval_agent_backend.json", agent_backend)
    write_json(FIXTURES / "judge_rubric.json", {"type": "rubric"})

    write_json(FIXTURES / "config_example.json", build_config_example())
    build_goldens(graph, catalog, backend_doc, session_doc, eval_doc)


if __name__ == "__main__":
    main()
