"""Turn execution: one user message drives one traversal from entry to final.

LLM nodes render their system prompt plus policy-filtered history, call the
backend, and route on the parsed output. Tool nodes execute their bound tool
with schema-gated arguments. Malformed, disallowed, or schema-invalid LLM
output re-invokes the same node with a corrective message appended, up to a
bounded retry count; the corrective exchange is transient (it shows up in the
trace's prompt snapshots, never in the session history).
"""
from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass
from typing import Any, NamedTuple

from .backends import BackendRequest, DecodeParams
from .grammar import Grammar, compile_grammar, recognize
from .graph import FinalNode, HistoryDirective, LlmNode, ToolNode, WorkflowGraph
from .messages import (
    Message,
    ToolCall,
    assistant_call,
    assistant_text,
    system_message,
    tool_result_message,
)
from .tools import ToolError, ToolRegistry, execute_tool

_ENVELOPE = re.compile(r"<tool_call>(.*)</tool_call>\s*\Z", re.DOTALL)

DEFAULT_FALLBACK_TEXT = "Sorry, I could not complete that request. Could you rephrase it?"


class EngineError(Exception):
    pass


class VisitLimitExceededError(EngineError):
    pass


class TurnBudgetExceededError(EngineError):
    pass


class ToolExecutionFailedError(EngineError):
    """Tool failure surfaced with the node where it happened."""

    def __init__(self, node_id: str, cause: Exception):
        self.node_id = node_id
        super().__init__(f"tool execution failed at node {node_id!r}: {cause}")


class MalformedEnvelopeError(EngineError):
    pass


class DisallowedToolError(EngineError):
    pass


@dataclass(frozen=True)
class Limits:
    max_visits: int
    max_retries: int = 3
    turn_budget_s: float = 60.0
    fallback_text: str = DEFAULT_FALLBACK_TEXT

    @classmethod
    def for_graph(cls, graph: WorkflowGraph, **overrides: Any) -> "Limits":
        overrides.setdefault("max_visits", 4 * len(graph.nodes))
        return cls(**overrides)


@dataclass(frozen=True)
class NodeVisit:
    node: str
    prompt_snapshot: dict | None
    raw_backend_output: str | None
    parsed_output: dict | None
    retries_used: int
    elapsed: float

    def to_dict(self, include_timing: bool = False) -> dict:
        out: dict[str, Any] = {
            "node": self.node,
            "prompt_snapshot": self.prompt_snapshot,
            "raw_backend_output": self.raw_backend_output,
            "parsed_output": self.parsed_output,
            "retries_used": self.retries_used,
        }
        if include_timing:
            # Wall-clock timing is diagnostic only; the canonical form leaves
            # it out so recorded traces are byte-stable across re-runs.
            out["elapsed"] = self.elapsed
        return out


@dataclass(frozen=True)
class TraversalTrace:
    turn_index: int
    visits: tuple[NodeVisit, ...]

    def to_dict(self, include_timing: bool = False) -> dict:
        return {
            "turn_index": self.turn_index,
            "visits": [v.to_dict(include_timing) for v in self.visits],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, separators=(",", ":"))

    def tool_calls(self) -> list[ToolCall]:
        calls = []
        for visit in self.visits:
            parsed = visit.parsed_output or {}
            if parsed.get("type") == "tool_call":
                calls.append(ToolCall(name=parsed["name"], arguments=parsed["arguments"]))
        return calls


def trace_from_dict(doc: dict) -> TraversalTrace:
    visits = tuple(
        NodeVisit(
            node=v["node"],
            prompt_snapshot=v.get("prompt_snapshot"),
            raw_backend_output=v.get("raw_backend_output"),
            parsed_output=v.get("parsed_output"),
            retries_used=v.get("retries_used", 0),
            elapsed=v.get("elapsed", 0.0),
        )
        for v in doc["visits"]
    )
    return TraversalTrace(turn_index=doc["turn_index"], visits=visits)


class TurnResult(NamedTuple):
    response: Message
    trace: TraversalTrace
    updated_history: list[Message]


def apply_history_policy(
    policy: tuple[HistoryDirective, ...], history: list[Message]
) -> list[Message]:
    """Apply directives in order; never mutates or reorders survivors."""
    messages = list(history)
    for directive in policy:
        if directive.op == "keep_all":
            continue
        if directive.op == "keep_last":
            messages = messages[-directive.count:]
        elif directive.op == "drop_role":
            messages = [m for m in messages if m.role != directive.role]
        elif directive.op == "keep_only_last_tool_result":
            tool_messages = [m for m in messages if m.role == "tool"]
            messages = [tool_messages[-1]] if tool_messages else []
        elif directive.op == "replace_system":
            messages = [m for m in messages if m.role != "system"]
            messages.insert(0, system_message(directive.text))
    return messages


def parse_llm_output(
    raw: str, node: LlmNode, graph: WorkflowGraph | None = None
) -> Message | ToolCall:
    """Parse raw backend output into a text message or a tool call.

    Raises MalformedEnvelopeError when the envelope marker is present but the
    payload is not a {"name", "arguments"} object, and DisallowedToolError
    when the named tool is not allow-listed on this node.
    """
    stripped = raw.strip()
    if "<tool_call>" not in stripped:
        return assistant_text(node.id, stripped)
    match = _ENVELOPE.match(stripped)
    if not match:
        raise MalformedEnvelopeError("tool call envelope is not properly closed")
    try:
        payload = json.loads(match.group(1))
    except json.JSONDecodeError as err:
        raise MalformedEnvelopeError(f"tool call payload is not valid JSON: {err}") from None
    if not isinstance(payload, dict) or set(payload) != {"name", "arguments"}:
        raise MalformedEnvelopeError('tool call payload must be {"name", "arguments"}')
    name = payload["name"]
    if not isinstance(name, str):
        raise MalformedEnvelopeError("tool name must be a string")
    if not _allowed_tool_node(name, node, graph):
        raise DisallowedToolError(f"tool {name!r} is not allowed on node {node.id!r}")
    return ToolCall(name=name, arguments=payload["arguments"])


def route(node: LlmNode, parsed: Message | ToolCall, graph: WorkflowGraph | None = None) -> str:
    """Successor choice: tool calls go to the matching tool node, text to the default."""
    if isinstance(parsed, ToolCall):
        target = _allowed_tool_node(parsed.name, node, graph)
        if target is None:  # pragma: no cover - parse_llm_output already rejects
            raise DisallowedToolError(f"tool {parsed.name!r} is not allowed on node {node.id!r}")
        return target
    return node.default_successor


def _allowed_tool_node(tool_name: str, node: LlmNode, graph: WorkflowGraph | None) -> str | None:
    if graph is not None:
        return graph.tool_node_for(tool_name, node.allowed_tools)
    return tool_name if tool_name in node.allowed_tools else None


def run_turn(
    graph: WorkflowGraph,
    session_history: list[Message],
    user_message: Message,
    backend: Any,
    registry: ToolRegistry,
    limits: Limits | None = None,
    turn_index: int = 0,
) -> TurnResult:
    """Execute one turn; returns (response, trace, updated_history)."""
    if user_message.role != "user":
        raise ValueError("run_turn expects a user message")
    limits = limits or Limits.for_graph(graph)
    if limits.max_visits < len(graph.nodes):
        raise ValueError("max_visits must be at least the node count")

    started = time.monotonic()
    history: list[Message] = list(session_history) + [user_message]
    visits: list[NodeVisit] = []
    grammars: dict[str, Grammar] = {}
    pending_call: ToolCall | None = None
    response: Message | None = None
    current = graph.entry

    for _ in range(limits.max_visits):
        if time.monotonic() - started > limits.turn_budget_s:
            raise TurnBudgetExceededError(f"turn exceeded {limits.turn_budget_s}s budget")
        spec = graph.nodes[current]

        if isinstance(spec, FinalNode):
            visits.append(
                NodeVisit(
                    node=current,
                    prompt_snapshot=None,
                    raw_backend_output=None,
                    parsed_output=None,
                    retries_used=0,
                    elapsed=0.0,
                )
            )
            break

        if isinstance(spec, LlmNode):
            outcome, visit = _run_llm_node(graph, spec, history, backend, registry, limits, grammars)
            visits.append(visit)
            if isinstance(outcome, ToolCall):
                message = assistant_call(spec.id, outcome)
                pending_call = outcome
            else:
                message = outcome
                response = outcome
            history.append(message)
            current = route(spec, outcome, graph)
            continue

        # Tool node
        call = _resolve_tool_call(spec, pending_call, history)
        pending_call = None
        t0 = time.monotonic()
        try:
            result = execute_tool(registry, call)
        except ToolError as err:
            raise ToolExecutionFailedError(current, err) from err
        history.append(tool_result_message(spec.id, result))
        visits.append(
            NodeVisit(
                node=current,
                prompt_snapshot=None,
                raw_backend_output=None,
                parsed_output={
                    "type": "tool_execution",
                    "tool_call": call.to_dict(),
                    "tool_result": result,
                },
                retries_used=0,
                elapsed=time.monotonic() - t0,
            )
        )
        current = spec.successor
    else:
        raise VisitLimitExceededError(f"traversal exceeded {limits.max_visits} node visits")

    if response is None:
        assistants = [m for m in history if m.role == "assistant"]
        if not assistants:
            raise EngineError("traversal reached final without an assistant message")
        response = assistants[-1]

    trace = TraversalTrace(turn_index=turn_index, visits=tuple(visits))
    return TurnResult(response=response, trace=trace, updated_history=history)


def _decode_params_for(node: LlmNode) -> DecodeParams:
    # Tool-selection nodes decode greedily; free-text nodes keep some warmth.
    temperature = 0.0 if node.allowed_tools or node.output_mode.kind == "constrained" else 0.7
    return DecodeParams(temperature=temperature)


def _run_llm_node(
    graph: WorkflowGraph,
    node: LlmNode,
    history: list[Message],
    backend: Any,
    registry: ToolRegistry,
    limits: Limits,
    grammars: dict[str, Grammar],
) -> tuple[Message | ToolCall, NodeVisit]:
    grammar = None
    if node.output_mode.kind == "constrained":
        ref = node.output_mode.schema_ref
        if ref not in grammars:
            grammars[ref] = compile_grammar(graph.resolve_schema(ref))
        grammar = grammars[ref]

    filtered = apply_history_policy(node.history_policy, history)
    working = list(filtered)
    retries = 0
    t0 = time.monotonic()
    raw = ""

    while True:
        request = BackendRequest(
            system_prompt=node.system_prompt,
            messages=tuple(working),
            constraint=grammar,
            decode_params=_decode_params_for(node),
            node_id=node.id,
        )
        raw = backend.complete(request)
        problem = None
        outcome: Message | ToolCall | None = None

        if grammar is not None and not recognize(grammar, raw.strip()):
            problem = "output does not match the required format"
        else:
            try:
                outcome = parse_llm_output(raw, node, graph)
            except (MalformedEnvelopeError, DisallowedToolError) as err:
                problem = str(err)
            else:
                if isinstance(outcome, ToolCall):
                    violations = registry.argument_violations(outcome)
                    if violations:
                        problem = "invalid tool arguments: " + "; ".join(
                            str(v) for v in violations
                        )

        if problem is None:
            parsed_doc = (
                {"type": "tool_call", **outcome.to_dict()}
                if isinstance(outcome, ToolCall)
                else {"type": "text", "content": outcome.content}
            )
            visit = NodeVisit(
                node=node.id,
                prompt_snapshot=_snapshot(request),
                raw_backend_output=raw,
                parsed_output=parsed_doc,
                retries_used=retries,
                elapsed=time.monotonic() - t0,
            )
            return outcome, visit

        retries += 1
        if retries > limits.max_retries:
            fallback = assistant_text(node.id, limits.fallback_text)
            visit = NodeVisit(
                node=node.id,
                prompt_snapshot=_snapshot(request),
                raw_backend_output=raw,
                parsed_output={"type": "text", "content": fallback.content, "fallback": True},
                retries_used=retries - 1,
                elapsed=time.monotonic() - t0,
            )
            return fallback, visit
        working.append(
            Message(
                role="tool",
                content=f"Invalid output (attempt {retries}): {problem}. "
                "Answer again following the required format.",
                origin_node=node.id,
                tool_result={"error": "invalid_output", "attempt": retries, "detail": problem},
            )
        )


def _resolve_tool_call(
    spec: ToolNode, pending_call: ToolCall | None, history: list[Message]
) -> ToolCall:
    if pending_call is not None:
        if pending_call.name != spec.tool_name:  # pragma: no cover - routing guarantees match
            raise EngineError(
                f"tool node {spec.id!r} received call for {pending_call.name!r}"
            )
        return pending_call
    # Constrained predecessors emit bare JSON arguments as text.
    last = history[-1] if history else None
    if last is not None and last.role == "assistant" and last.content:
        try:
            arguments = json.loads(last.content)
        except json.JSONDecodeError:
            arguments = None
        if arguments is not None:
            return ToolCall(name=spec.tool_name, arguments=arguments)
    raise EngineError(f"tool node {spec.id!r} reached without arguments")


def _snapshot(request: BackendRequest) -> dict:
    return {
        "system_prompt": request.system_prompt,
        "messages": [m.to_dict() for m in request.messages],
        "constrained": request.constraint is not None,
        "temperature": request.decode_params.temperature,
    }


def replay_visit_sequence(trace: TraversalTrace) -> list[str]:
    """Node ids in visit order (convenience for diffing replays)."""
    return [v.node for v in trace.visits]
