"""Workflow graph: node specs, loading from JSON documents, and validation.

A graph is a DAG walked once per agent turn, from the entry node to the final
node. LLM nodes carry a node-specific system prompt and a history policy; tool
nodes bind a registered tool with input/output schemas. The loader is strict:
unknown keys anywhere in the document are errors.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

from .schema import SchemaError, SchemaNode, parse_schema, schema_to_dict

ROLES = ("system", "user", "assistant", "tool")
_DIRECTIVE_OPS = ("keep_all", "keep_last", "drop_role", "keep_only_last_tool_result", "replace_system")


class GraphLoadError(ValueError):
    """Graph document cannot be turned into a WorkflowGraph."""


class GraphParseError(GraphLoadError):
    pass


class UnknownNodeRefError(GraphLoadError):
    pass


class UnknownSchemaRefError(GraphLoadError):
    pass


@dataclass(frozen=True)
class HistoryDirective:
    op: str
    count: int | None = None
    role: str | None = None
    text: str | None = None

    def __post_init__(self) -> None:
        if self.op not in _DIRECTIVE_OPS:
            raise GraphParseError(f"unknown history directive {self.op!r}")
        if self.op == "keep_last" and (not isinstance(self.count, int) or self.count < 1):
            raise GraphParseError("keep_last needs a positive count")
        if self.op == "drop_role" and self.role not in ROLES:
            raise GraphParseError(f"drop_role needs a role, got {self.role!r}")
        if self.op == "replace_system" and not isinstance(self.text, str):
            raise GraphParseError("replace_system needs text")


KEEP_ALL = (HistoryDirective(op="keep_all"),)


@dataclass(frozen=True)
class OutputMode:
    kind: str  # "free_text" | "constrained"
    schema_ref: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("free_text", "constrained"):
            raise GraphParseError(f"unknown output mode {self.kind!r}")
        if self.kind == "constrained" and not self.schema_ref:
            raise GraphParseError("constrained output mode needs a schema reference")


FREE_TEXT = OutputMode(kind="free_text")


@dataclass(frozen=True)
class LlmNode:
    id: str
    system_prompt: str
    history_policy: tuple[HistoryDirective, ...] = KEEP_ALL
    allowed_tools: tuple[str, ...] = ()
    default_successor: str = ""
    output_mode: OutputMode = FREE_TEXT
    format_profile_ref: str | None = None


@dataclass(frozen=True)
class ToolNode:
    id: str
    tool_name: str
    input_schema: str
    output_schema: str
    successor: str


@dataclass(frozen=True)
class FinalNode:
    id: str


NodeSpec = Union[LlmNode, ToolNode, FinalNode]


@dataclass(frozen=True)
class GraphViolation:
    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.subject}: {self.message}"


@dataclass(frozen=True)
class WorkflowGraph:
    nodes: dict[str, NodeSpec]
    edges: frozenset[tuple[str, str]]
    entry: str
    final: str
    schemas: dict[str, SchemaNode] = field(default_factory=dict)

    def successors(self, node_id: str) -> list[str]:
        return sorted(dst for src, dst in self.edges if src == node_id)

    def predecessors(self, node_id: str) -> list[str]:
        return sorted(src for src, dst in self.edges if dst == node_id)

    def resolve_schema(self, ref: str) -> SchemaNode:
        try:
            return self.schemas[ref]
        except KeyError:
            raise UnknownSchemaRefError(f"unknown schema reference {ref!r}") from None

    def tool_node_for(self, tool_name: str, allowed: tuple[str, ...]) -> str | None:
        for node_id in allowed:
            spec = self.nodes.get(node_id)
            if isinstance(spec, ToolNode) and spec.tool_name == tool_name:
                return node_id
        return None


_TOP_KEYS = {"nodes", "edges", "entry", "final", "schemas"}
_LLM_KEYS = {
    "type",
    "system_prompt",
    "history_policy",
    "allowed_tools",
    "default_successor",
    "output_mode",
    "format_profile_ref",
}
_TOOL_KEYS = {"type", "tool_name", "input_schema", "output_schema", "successor"}
_FINAL_KEYS = {"type"}


def load_graph(source: str | Path | dict) -> WorkflowGraph:
    """Load and resolve a graph document (path, JSON text, or parsed dict)."""
    doc = _read_document(source)
    if not isinstance(doc, dict):
        raise GraphParseError("graph document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise GraphParseError(f"unknown top-level keys: {sorted(unknown)}")
    for key in ("nodes", "edges", "entry", "final"):
        if key not in doc:
            raise GraphParseError(f"missing top-level key {key!r}")

    schemas: dict[str, SchemaNode] = {}
    for name, sub in (doc.get("schemas") or {}).items():
        try:
            schemas[name] = parse_schema(sub, path=name)
        except SchemaError as err:
            raise GraphParseError(f"schema {name!r}: {err}") from None

    nodes: dict[str, NodeSpec] = {}
    for node_id, spec_doc in doc["nodes"].items():
        nodes[node_id] = _parse_node(node_id, spec_doc)

    edges: set[tuple[str, str]] = set()
    for pair in doc["edges"]:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise GraphParseError(f"edge must be a [from, to] pair, got {pair!r}")
        edges.add((pair[0], pair[1]))

    graph = WorkflowGraph(
        nodes=nodes, edges=frozenset(edges), entry=doc["entry"], final=doc["final"], schemas=schemas
    )
    _resolve_references(graph)
    return graph


def _read_document(source: str | Path | dict) -> Any:
    if isinstance(source, dict):
        return source
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as err:
            raise GraphParseError(f"cannot read graph file: {err}") from None
    else:
        text = source
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise GraphParseError(f"malformed graph document: {err}") from None


def _parse_node(node_id: str, doc: Any) -> NodeSpec:
    if not isinstance(doc, dict):
        raise GraphParseError(f"node {node_id!r}: spec must be an object")
    node_type = doc.get("type")
    if node_type == "llm":
        _check_keys(node_id, doc, _LLM_KEYS)
        return LlmNode(
            id=node_id,
            system_prompt=_req(node_id, doc, "system_prompt", str),
            history_policy=_parse_policy(node_id, doc.get("history_policy", ["keep_all"])),
            allowed_tools=tuple(doc.get("allowed_tools", [])),
            default_successor=_req(node_id, doc, "default_successor", str),
            output_mode=_parse_output_mode(node_id, doc.get("output_mode", "free_text")),
            format_profile_ref=doc.get("format_profile_ref"),
        )
    if node_type == "tool":
        _check_keys(node_id, doc, _TOOL_KEYS)
        return ToolNode(
            id=node_id,
            tool_name=_req(node_id, doc, "tool_name", str),
            input_schema=_req(node_id, doc, "input_schema", str),
            output_schema=_req(node_id, doc, "output_schema", str),
            successor=_req(node_id, doc, "successor", str),
        )
    if node_type == "final":
        _check_keys(node_id, doc, _FINAL_KEYS)
        return FinalNode(id=node_id)
    raise GraphParseError(f"node {node_id!r}: unknown type {node_type!r}")


def _check_keys(node_id: str, doc: dict, allowed: set[str]) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise GraphParseError(f"node {node_id!r}: unknown keys {sorted(unknown)}")


def _req(node_id: str, doc: dict, key: str, typ: type) -> Any:
    value = doc.get(key)
    if not isinstance(value, typ):
        raise GraphParseError(f"node {node_id!r}: {key} must be {typ.__name__}")
    return value


def _parse_policy(node_id: str, doc: Any) -> tuple[HistoryDirective, ...]:
    if not isinstance(doc, list):
        raise GraphParseError(f"node {node_id!r}: history_policy must be a list")
    directives = []
    for entry in doc:
        try:
            directives.append(_parse_directive(entry))
        except GraphParseError as err:
            raise GraphParseError(f"node {node_id!r}: {err}") from None
    return tuple(directives)


def _parse_directive(entry: Any) -> HistoryDirective:
    if isinstance(entry, str):
        return HistoryDirective(op=entry)
    if isinstance(entry, dict) and len(entry) == 1:
        (op, arg), = entry.items()
        if op == "keep_last":
            return HistoryDirective(op=op, count=arg)
        if op == "drop_role":
            return HistoryDirective(op=op, role=arg)
        if op == "replace_system":
            return HistoryDirective(op=op, text=arg)
    raise GraphParseError(f"unknown history directive {entry!r}")


def _parse_output_mode(node_id: str, doc: Any) -> OutputMode:
    if doc == "free_text":
        return FREE_TEXT
    if isinstance(doc, dict) and set(doc) == {"constrained"}:
        return OutputMode(kind="constrained", schema_ref=doc["constrained"])
    raise GraphParseError(f"node {node_id!r}: unknown output_mode {doc!r}")


def _resolve_references(graph: WorkflowGraph) -> None:
    """Loader-level resolution: every name mentioned must exist."""
    for src, dst in sorted(graph.edges):
        for end in (src, dst):
            if end not in graph.nodes:
                raise UnknownNodeRefError(f"edge ({src!r}, {dst!r}) references unknown node {end!r}")
    for key in (graph.entry, graph.final):
        if key not in graph.nodes:
            raise UnknownNodeRefError(f"unknown node reference {key!r}")
    for node_id, spec in sorted(graph.nodes.items()):
        if isinstance(spec, LlmNode):
            for ref in (spec.default_successor, *spec.allowed_tools):
                if ref not in graph.nodes:
                    raise UnknownNodeRefError(f"node {node_id!r} references unknown node {ref!r}")
            if spec.output_mode.kind == "constrained":
                if spec.output_mode.schema_ref not in graph.schemas:
                    raise UnknownSchemaRefError(
                        f"node {node_id!r} references unknown schema {spec.output_mode.schema_ref!r}"
                    )
        elif isinstance(spec, ToolNode):
            if spec.successor not in graph.nodes:
                raise UnknownNodeRefError(
                    f"node {node_id!r} references unknown node {spec.successor!r}"
                )
            for ref in (spec.input_schema, spec.output_schema):
                if ref not in graph.schemas:
                    raise UnknownSchemaRefError(f"node {node_id!r} references unknown schema {ref!r}")


def serialize_graph(graph: WorkflowGraph) -> dict:
    """Document form of a graph; load_graph(serialize_graph(g)) == g."""
    nodes: dict[str, Any] = {}
    for node_id, spec in graph.nodes.items():
        if isinstance(spec, LlmNode):
            doc: dict[str, Any] = {
                "type": "llm",
                "system_prompt": spec.system_prompt,
                "history_policy": [_directive_doc(d) for d in spec.history_policy],
                "allowed_tools": list(spec.allowed_tools),
                "default_successor": spec.default_successor,
                "output_mode": "free_text"
                if spec.output_mode.kind == "free_text"
                else {"constrained": spec.output_mode.schema_ref},
            }
            if spec.format_profile_ref is not None:
                doc["format_profile_ref"] = spec.format_profile_ref
            nodes[node_id] = doc
        elif isinstance(spec, ToolNode):
            nodes[node_id] = {
                "type": "tool",
                "tool_name": spec.tool_name,
                "input_schema": spec.input_schema,
                "output_schema": spec.output_schema,
                "successor": spec.successor,
            }
        else:
            nodes[node_id] = {"type": "final"}
    return {
        "nodes": nodes,
        "edges": [list(edge) for edge in sorted(graph.edges)],
        "entry": graph.entry,
        "final": graph.final,
        "schemas": {name: schema_to_dict(s) for name, s in sorted(graph.schemas.items())},
    }


def _directive_doc(d: HistoryDirective) -> Any:
    if d.op == "keep_last":
        return {"keep_last": d.count}
    if d.op == "drop_role":
        return {"drop_role": d.role}
    if d.op == "replace_system":
        return {"replace_system": d.text}
    return d.op


def validate_graph(graph: WorkflowGraph) -> list[GraphViolation]:
    """Structural validity report; an empty list means the graph is traversable.

    The report is deterministic and independent of node declaration order.
    """
    out: list[GraphViolation] = []

    def add(code: str, subject: str, message: str) -> None:
        out.append(GraphViolation(code, subject, message))

    if graph.entry not in graph.nodes:
        add("entry_missing", graph.entry, "entry node is not declared")
    if graph.final not in graph.nodes:
        add("final_missing", graph.final, "final node is not declared")
    if not out and not isinstance(graph.nodes[graph.final], FinalNode):
        add("final_wrong_kind", graph.final, "final node must be a final-type node")
    if not out and not isinstance(graph.nodes[graph.entry], LlmNode):
        add("entry_not_llm", graph.entry, "entry node must be an LLM node")

    for src, dst in sorted(graph.edges):
        for end in (src, dst):
            if end not in graph.nodes:
                add("edge_unknown_node", f"{src}->{dst}", f"edge endpoint {end!r} is not declared")

    if graph.final in graph.nodes:
        for dst in graph.successors(graph.final):
            add("final_outgoing", graph.final, f"final node has outgoing edge to {dst!r}")

    known_edges = {(s, d) for s, d in graph.edges if s in graph.nodes and d in graph.nodes}

    cycle = _find_cycle(graph.nodes, known_edges)
    if cycle:
        add("cycle", "->".join(cycle), "edge relation contains a cycle")

    reachable = _reach(graph.entry, known_edges, forward=True)
    for node_id in sorted(graph.nodes):
        if node_id not in reachable:
            add("unreachable", node_id, "not reachable from the entry node")

    co_reachable = _reach(graph.final, known_edges, forward=False)
    for node_id in sorted(graph.nodes):
        if node_id not in co_reachable:
            add("dead_end", node_id, "final node is not reachable from here")

    for node_id in sorted(graph.nodes):
        spec = graph.nodes[node_id]
        if isinstance(spec, LlmNode):
            for tool_id in spec.allowed_tools:
                if not isinstance(graph.nodes.get(tool_id), ToolNode):
                    add("allowed_tool_invalid", node_id, f"allowed tool {tool_id!r} is not a tool node")
                elif (node_id, tool_id) not in known_edges:
                    add("allowed_tool_invalid", node_id, f"no edge to allowed tool {tool_id!r}")
            if spec.default_successor and (node_id, spec.default_successor) not in known_edges:
                add(
                    "default_successor_invalid",
                    node_id,
                    f"no edge to default successor {spec.default_successor!r}",
                )
            if spec.output_mode.kind == "constrained" and spec.output_mode.schema_ref not in graph.schemas:
                add("schema_unresolved", node_id, f"unknown schema {spec.output_mode.schema_ref!r}")
        elif isinstance(spec, ToolNode):
            if (node_id, spec.successor) not in known_edges:
                add("tool_successor_invalid", node_id, f"no edge to successor {spec.successor!r}")
            if not graph.successors(node_id):
                add("tool_no_successor", node_id, "tool node needs at least one successor")
            preds = [p for p in graph.predecessors(node_id) if p in graph.nodes]
            if not preds:
                add("tool_unserved", node_id, "tool node has no incoming edge from an LLM node")
            for pred in preds:
                pred_spec = graph.nodes[pred]
                if not isinstance(pred_spec, LlmNode):
                    add("tool_bad_predecessor", node_id, f"incoming edge from non-LLM node {pred!r}")
                elif node_id not in pred_spec.allowed_tools:
                    add(
                        "tool_bad_predecessor",
                        node_id,
                        f"LLM node {pred!r} does not allow-list this tool",
                    )
            for ref in (spec.input_schema, spec.output_schema):
                if ref not in graph.schemas:
                    add("schema_unresolved", node_id, f"unknown schema {ref!r}")

    out.sort(key=lambda v: (v.code, v.subject, v.message))
    return out


def _find_cycle(nodes: dict[str, NodeSpec], edges: set[tuple[str, str]]) -> list[str] | None:
    adjacency: dict[str, list[str]] = {n: [] for n in nodes}
    for src, dst in sorted(edges):
        adjacency[src].append(dst)

    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    stack: list[str] = []

    def dfs(node: str) -> list[str] | None:
        color[node] = GREY
        stack.append(node)
        for nxt in adjacency[node]:
            if color[nxt] == GREY:
                return stack[stack.index(nxt):] + [nxt]
            if color[nxt] == WHITE:
                found = dfs(nxt)
                if found:
                    return found
        stack.pop()
        color[node] = BLACK
        return None

    for start in sorted(nodes):
        if color[start] == WHITE:
            found = dfs(start)
            if found:
                return found
    return None


def _reach(start: str, edges: set[tuple[str, str]], forward: bool) -> set[str]:
    if forward:
        adjacency: dict[str, set[str]] = {}
        for src, dst in edges:
            adjacency.setdefault(src, set()).add(dst)
    else:
        adjacency = {}
        for src, dst in edges:
            adjacency.setdefault(dst, set()).add(src)
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for nxt in adjacency.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen
