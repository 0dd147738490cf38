"""Graph loading, validation, and round-trip serialization."""
from __future__ import annotations

import json

import pytest

from flowagent.graph import (
    FinalNode,
    GraphParseError,
    LlmNode,
    ToolNode,
    UnknownNodeRefError,
    UnknownSchemaRefError,
    WorkflowGraph,
    load_graph,
    serialize_graph,
    validate_graph,
)

from conftest import fixture_path


def graph_doc() -> dict:
    return json.loads(open(fixture_path("graph_gift_shop.json"), encoding="utf-8").read())


def test_bundled_graph_loads_and_validates_clean(gift_graph):
    assert validate_graph(gift_graph) == []
    assert gift_graph.entry == "chat"
    assert isinstance(gift_graph.nodes["final"], FinalNode)
    assert isinstance(gift_graph.nodes["recommend_gift"], ToolNode)


def test_minimal_two_node_graph():
    doc = {
        "nodes": {
            "chat": {
                "type": "llm",
                "system_prompt": "Reply briefly.",
                "default_successor": "final",
            },
            "final": {"type": "final"},
        },
        "edges": [["chat", "final"]],
        "entry": "chat",
        "final": "final",
    }
    graph = load_graph(doc)
    assert validate_graph(graph) == []
    assert set(graph.nodes) == {"chat", "final"}


def test_edge_to_undeclared_node_is_a_load_error():
    doc = graph_doc()
    doc["edges"].append(["chat", "ghost"])
    with pytest.raises(UnknownNodeRefError, match="ghost"):
        load_graph(doc)


def test_unknown_schema_reference_is_a_load_error():
    doc = graph_doc()
    del doc["schemas"]["recommend_gift_input"]
    with pytest.raises(UnknownSchemaRefError, match="recommend_gift_input"):
        load_graph(doc)


def test_unknown_keys_are_strict_errors():
    doc = graph_doc()
    doc["nodes"]["chat"]["resilience"] = True
    with pytest.raises(GraphParseError, match="resilience"):
        load_graph(doc)
    doc = graph_doc()
    doc["comment"] = "hello"
    with pytest.raises(GraphParseError, match="comment"):
        load_graph(doc)


def test_malformed_document_is_a_parse_error():
    with pytest.raises(GraphParseError):
        load_graph('{"nodes": ')


def test_unreachable_node_is_reported(gift_graph):
    doc = graph_doc()
    doc["nodes"]["orphan"] = {
        "type": "llm",
        "system_prompt": "unused",
        "default_successor": "final",
    }
    doc["edges"].append(["orphan", "final"])
    graph = load_graph(doc)
    violations = validate_graph(graph)
    assert any(v.code == "unreachable" and v.subject == "orphan" for v in violations)


def test_cycle_is_reported_with_its_path():
    doc = graph_doc()
    doc["edges"].append(["recommend_reason", "chat"])
    graph = load_graph(doc)
    violations = validate_graph(graph)
    cycles = [v for v in violations if v.code == "cycle"]
    assert cycles and "chat" in cycles[0].subject


def test_dead_end_is_reported():
    doc = graph_doc()
    doc["nodes"]["island"] = {
        "type": "llm",
        "system_prompt": "stuck",
        "default_successor": "final",
    }
    doc["edges"].append(["chat", "island"])  # no way out of island
    graph = load_graph(doc)
    violations = validate_graph(graph)
    assert any(v.code == "dead_end" and v.subject == "island" for v in violations)


def test_tool_predecessor_must_allow_list_it():
    doc = graph_doc()
    doc["nodes"]["chat"]["allowed_tools"].remove("recommend_gift")
    graph = load_graph(doc)
    violations = validate_graph(graph)
    assert any(v.code == "tool_bad_predecessor" and v.subject == "recommend_gift" for v in violations)


def test_validation_is_order_independent():
    doc = graph_doc()
    shuffled = dict(doc)
    shuffled["nodes"] = dict(reversed(list(doc["nodes"].items())))
    assert validate_graph(load_graph(doc)) == validate_graph(load_graph(shuffled))


def test_round_trip_is_identity(gift_graph):
    assert load_graph(serialize_graph(gift_graph)) == gift_graph


def test_round_trip_twice_is_stable(gift_graph):
    once = serialize_graph(gift_graph)
    twice = serialize_graph(load_graph(once))
    assert once == twice


def test_every_node_reaches_final(gift_graph):
    # Exhaustive BFS per node, independent of the validator's internals.
    adjacency: dict[str, list[str]] = {n: [] for n in gift_graph.nodes}
    for src, dst in gift_graph.edges:
        adjacency[src].append(dst)
    for start in gift_graph.nodes:
        seen, frontier = {start}, [start]
        while frontier:
            node = frontier.pop()
            for nxt in adjacency[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        assert gift_graph.final in seen, start


def test_fifty_node_graph_validates_and_reaches_final():
    # Synthetic wide graph: 24 chains of tool -> llm hanging off the entry
    # node, 50 nodes total, every node on a path to final.
    nodes: dict = {"final": {"type": "final"}}
    edges: list = [["chat", "final"]]
    schemas = {
        "ping_in": {"type": "object", "properties": {"q": {"type": "string"}}},
        "ping_out": {"type": "object", "properties": {"ok": {"type": "boolean"}}},
    }
    tool_ids = []
    for i in range(24):
        tool_id, reply_id = f"tool{i}", f"reply{i}"
        tool_ids.append(tool_id)
        nodes[tool_id] = {
            "type": "tool",
            "tool_name": f"ping{i}",
            "input_schema": "ping_in",
            "output_schema": "ping_out",
            "successor": reply_id,
        }
        nodes[reply_id] = {
            "type": "llm",
            "system_prompt": f"Summarize ping {i}.",
            "default_successor": "final",
        }
        edges += [["chat", tool_id], [tool_id, reply_id], [reply_id, "final"]]
    nodes["chat"] = {
        "type": "llm",
        "system_prompt": "Route pings.",
        "allowed_tools": tool_ids,
        "default_successor": "final",
    }
    graph = load_graph(
        {"nodes": nodes, "edges": edges, "entry": "chat", "final": "final", "schemas": schemas}
    )
    assert len(graph.nodes) == 50
    assert validate_graph(graph) == []
    adjacency: dict[str, list[str]] = {n: [] for n in graph.nodes}
    for src, dst in graph.edges:
        adjacency[src].append(dst)
    for start in graph.nodes:
        seen, frontier = {start}, [start]
        while frontier:
            node = frontier.pop()
            for nxt in adjacency[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        assert graph.final in seen, start


def test_programmatic_graph_dangling_edge_violation():
    graph = WorkflowGraph(
        nodes={
            "chat": LlmNode(id="chat", system_prompt="x", default_successor="final"),
            "final": FinalNode(id="final"),
        },
        edges=frozenset({("chat", "final"), ("chat", "ghost")}),
        entry="chat",
        final="final",
    )
    violations = validate_graph(graph)
    assert any(v.code == "edge_unknown_node" and "ghost" in v.message for v in violations)
