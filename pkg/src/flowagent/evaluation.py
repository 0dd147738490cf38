"""Turn-level evaluation: tool accuracy, format adherence, response quality.

Accuracy and quality are scored by a judge backend against rubric prompts
shipped verbatim as template files; format adherence is a strictly coded
validator over per-node rule profiles. A deterministic rubric judge double
implements the prompt criteria literally so the whole harness runs without a
live model.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from .backends import (
    JudgeResult,
    JudgeUnparseableError,
    ParseSpec,
    ScriptedBackend,
    judge,
)
from .engine import Limits, run_turn
from .graph import FinalNode, LlmNode, ToolNode, WorkflowGraph
from .messages import Message, ToolCall, user_message
from .recorder import ConversationRecord
from .tools import ToolRegistry

RULE_KINDS = (
    "max_chars",
    "line_prefix_emoji",
    "forbidden_pattern",
    "required_section",
    "no_duplicate_of_tool_cards",
)

_EMOJI_RANGES = ((0x1F000, 0x1FAFF), (0x2600, 0x27BF), (0x2B00, 0x2BFF), (0x1F900, 0x1F9FF))

ACCURACY_PROMPT_FILE = "tool_accuracy.txt"
QUALITY_PROMPT_FILE = "response_quality.txt"


def load_prompt(name: str) -> str:
    return (resources.files("flowagent") / "fixtures" / "prompts" / name).read_text(
        encoding="utf-8"
    )


# --------------------------------------------------------------------------
# Format adherence (coded validator)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FormatRule:
    kind: str
    params: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in RULE_KINDS:
            raise ValueError(f"unknown format rule kind {self.kind!r}")

    def param(self, name: str, default: Any = None) -> Any:
        return dict(self.params).get(name, default)


@dataclass(frozen=True)
class FormatProfile:
    name: str
    rules: tuple[FormatRule, ...]


@dataclass(frozen=True)
class FormatViolation:
    rule: str
    location: str
    detail: str

    def __str__(self) -> str:
        return f"{self.rule} at {self.location}: {self.detail}"


@dataclass(frozen=True)
class TurnContext:
    """What the turn showed besides the response (tool cards, etc.)."""

    tool_results: tuple[tuple[str, Any], ...] = ()

    def card_titles(self, non_card_tools: tuple[str, ...] = ("purchase_gift",)) -> list[str]:
        titles: list[str] = []
        for tool_name, result in self.tool_results:
            if tool_name in non_card_tools:
                continue
            _collect_titles(result, titles)
        return titles


def _collect_titles(value: Any, out: list[str]) -> None:
    if isinstance(value, dict):
        title = value.get("title")
        if isinstance(title, str):
            out.append(title)
        for v in value.values():
            _collect_titles(v, out)
    elif isinstance(value, list):
        for v in value:
            _collect_titles(v, out)


def parse_profiles(doc: dict) -> dict[str, FormatProfile]:
    profiles = {}
    for name, profile_doc in doc.items():
        rules = []
        for rule_doc in profile_doc.get("rules", []):
            kind = rule_doc.get("kind")
            params = tuple(sorted((k, v) for k, v in rule_doc.items() if k != "kind"))
            rules.append(FormatRule(kind=kind, params=params))
        profiles[name] = FormatProfile(name=name, rules=tuple(rules))
    return profiles


def _starts_with_emoji(line: str) -> bool:
    stripped = line.lstrip()
    if not stripped:
        return False
    code = ord(stripped[0])
    return any(lo <= code <= hi for lo, hi in _EMOJI_RANGES)


def check_format(
    profile: FormatProfile, response: Message, context: TurnContext | None = None
) -> tuple[int, list[FormatViolation]]:
    """Mechanical rule check; deterministic and independent of rule order."""
    context = context or TurnContext()
    text = response.rendered_content()
    violations: list[FormatViolation] = []
    for rule in profile.rules:
        if rule.kind == "max_chars":
            limit = rule.param("max", 500)
            if len(text) > limit:
                violations.append(
                    FormatViolation("max_chars", "response", f"{len(text)} chars exceeds {limit}")
                )
        elif rule.kind == "line_prefix_emoji":
            for i, line in enumerate(text.splitlines(), start=1):
                if line.strip() and not _starts_with_emoji(line):
                    violations.append(
                        FormatViolation("line_prefix_emoji", f"line {i}", "line does not start with an emoji")
                    )
        elif rule.kind == "forbidden_pattern":
            pattern = rule.param("pattern", "")
            match = re.search(pattern, text)
            if match:
                violations.append(
                    FormatViolation(
                        "forbidden_pattern",
                        f"offset {match.start()}",
                        f"matches forbidden pattern {rule.param('label') or pattern!r}",
                    )
                )
        elif rule.kind == "required_section":
            name = rule.param("name", "")
            if name not in text:
                violations.append(
                    FormatViolation("required_section", "response", f"missing section {name!r}")
                )
        elif rule.kind == "no_duplicate_of_tool_cards":
            allowed = rule.param("max_title_mentions", 1)
            mentioned = sorted({t for t in context.card_titles() if t and t in text})
            if len(mentioned) > allowed:
                violations.append(
                    FormatViolation(
                        "no_duplicate_of_tool_cards",
                        "response",
                        f"repeats {len(mentioned)} tool card titles: {', '.join(mentioned)}",
                    )
                )
    violations.sort(key=lambda v: (v.rule, v.location, v.detail))
    return (0 if violations else 1), violations


# --------------------------------------------------------------------------
# Judge payload rendering
# --------------------------------------------------------------------------


def tools_description(registry: ToolRegistry) -> list[dict]:
    from .schema import schema_to_dict

    return [
        {
            "name": name,
            "description": registry.get(name).description,
            "arguments": schema_to_dict(registry.get(name).input_schema),
        }
        for name in registry.names()
    ]


def _compact(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def _history_block(history: list[Message]) -> str:
    lines = ["<history>"]
    for m in history:
        lines.append(f'  <message role="{m.role}">{m.rendered_content()}</message>')
    lines.append("</history>")
    return "\n".join(lines)


def render_accuracy_payload(
    tools_desc: list[dict],
    history: list[Message],
    reference_call: ToolCall,
    actual_call: ToolCall,
) -> str:
    lines = ["<tools>"]
    for tool in tools_desc:
        lines += [
            "  <tool>",
            f"    <name>{tool['name']}</name>",
            f"    <description>{tool['description']}</description>",
            "    <arguments>"
            + json.dumps(tool["arguments"], ensure_ascii=False, separators=(",", ":"))
            + "</arguments>",
            "  </tool>",
        ]
    lines.append("</tools>")
    payload = [
        "\n".join(lines),
        _history_block(history),
        "<reference_tool_call>",
        f"  <name>{reference_call.name}</name>",
        f"  <arguments>{_compact(reference_call.arguments)}</arguments>",
        "</reference_tool_call>",
        "<tool_call>",
        f"  <name>{actual_call.name}</name>",
        f"  <arguments>{_compact(actual_call.arguments)}</arguments>",
        "</tool_call>",
    ]
    return "\n".join(payload)


def render_quality_payload(history: list[Message], response: str, reference: str) -> str:
    return "\n".join(
        [
            _history_block(history),
            f"<response>{response}</response>",
            f"<reference>{reference}</reference>",
        ]
    )


def judge_accuracy(
    judge_backend: Any,
    tools_desc: list[dict],
    history: list[Message],
    reference_call: ToolCall,
    actual_call: ToolCall,
) -> JudgeResult:
    payload = render_accuracy_payload(tools_desc, history, reference_call, actual_call)
    return judge(judge_backend, load_prompt(ACCURACY_PROMPT_FILE), payload, ParseSpec((0, 1)))


def judge_quality(
    judge_backend: Any, history: list[Message], response: str, reference: str
) -> JudgeResult:
    payload = render_quality_payload(history, response, reference)
    return judge(judge_backend, load_prompt(QUALITY_PROMPT_FILE), payload, ParseSpec((1, 2, 3)))


# --------------------------------------------------------------------------
# Deterministic rubric judge (test double implementing the prompts literally)
# --------------------------------------------------------------------------


# Top-level payload blocks start at column zero; envelope text quoted inside
# <history> lines must not be mistaken for them, hence the anchors.
_BLOCK = {
    name: re.compile(rf"^<{name}>\n(.*?)^</{name}>", re.DOTALL | re.MULTILINE)
    for name in ("reference_tool_call", "tool_call")
}
_INLINE = {
    name: re.compile(rf"^<{name}>(.*?)</{name}>$", re.DOTALL | re.MULTILINE)
    for name in ("response", "reference")
}
_TAG = {name: re.compile(rf"<{name}>(.*?)</{name}>", re.DOTALL) for name in ("name", "arguments")}


class RubricJudge:
    """Judge backend double: applies the rubric rules mechanically.

    Only meaningful for payloads rendered by this module; output follows the
    two-line Reason/Score format so it exercises the real parse path.
    """

    def complete(self, request: Any) -> str:
        payload = ""
        for m in request.messages:
            if m.role == "user":
                payload = m.content
                break
        if _BLOCK["reference_tool_call"].search(payload):
            reason, score = self._accuracy(payload)
        else:
            reason, score = self._quality(payload)
        return f"- Reason: {reason}\n- Score: {score}"

    def _accuracy(self, payload: str) -> tuple[str, int]:
        reference = _BLOCK["reference_tool_call"].search(payload).group(1)
        actual = _BLOCK["tool_call"].search(payload).group(1)
        ref_name = _TAG["name"].search(reference).group(1)
        act_name = _TAG["name"].search(actual).group(1)
        if ref_name != act_name:
            return f"wrong tool selected: {act_name} instead of {ref_name}.", 0
        ref_args = json.loads(_TAG["arguments"].search(reference).group(1))
        act_args = json.loads(_TAG["arguments"].search(actual).group(1))
        for stem in {k[: -len("_min")] for k in act_args if k.endswith("_min")}:
            lo, hi = act_args.get(f"{stem}_min"), act_args.get(f"{stem}_max")
            if lo is not None and lo == hi:
                return f"the {stem} range starts and ends at the same value.", 0
        missing = [k for k in ref_args if k not in act_args]
        if missing:
            return f"required arguments not extracted: {', '.join(sorted(missing))}.", 0
        if not self._similar(ref_args, act_args):
            return "arguments are not semantically similar to the reference.", 0
        return "tool and arguments match the reference.", 1

    def _similar(self, ref: Any, act: Any) -> bool:
        if isinstance(ref, str) and isinstance(act, str):
            return ref.strip().lower() == act.strip().lower()
        if isinstance(ref, dict) and isinstance(act, dict):
            return set(ref) == set(act) and all(self._similar(ref[k], act[k]) for k in ref)
        if isinstance(ref, list) and isinstance(act, list):
            return len(ref) == len(act) and all(self._similar(r, a) for r, a in zip(ref, act))
        return ref == act

    def _quality(self, payload: str) -> tuple[str, int]:
        response = _INLINE["response"].search(payload).group(1)
        reference = _INLINE["reference"].search(payload).group(1)
        if response.strip() == reference.strip():
            return "response matches the reference.", 3
        if re.search(r"\b(\w+)(?: \1\b){2,}", response):
            return "response contains repeated words.", 1
        ref_tokens = set(reference.lower().split())
        act_tokens = set(response.lower().split())
        if ref_tokens and len(ref_tokens & act_tokens) / len(ref_tokens | act_tokens) >= 0.5:
            return "response paraphrases the reference.", 2
        return "response content diverges from the reference.", 1


def load_judge_backend(source: str | Path | dict) -> Any:
    """Judge backend from a fixture document: rubric double or scripted rules."""
    if isinstance(source, (str, Path)):
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        doc = source
    judge_type = doc.get("type", "rubric")
    if judge_type == "rubric":
        return RubricJudge()
    if judge_type == "rules":
        return ScriptedBackend.from_dict({k: v for k, v in doc.items() if k != "type"})
    raise ValueError(f"unknown judge backend type {judge_type!r}")


# --------------------------------------------------------------------------
# Harness
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalTurn:
    user_message: str
    reference_response: str
    reference_call: ToolCall | None = None
    profile_ref: str | None = None
    reference_messages: tuple[Message, ...] = ()


@dataclass(frozen=True)
class EvalConversation:
    id: str
    turns: tuple[EvalTurn, ...]


@dataclass(frozen=True)
class AgentConfig:
    graph: WorkflowGraph
    backend: Any
    registry_factory: Callable[[], ToolRegistry]
    format_profiles: dict[str, FormatProfile] = field(default_factory=dict)
    limits: Limits | None = None
    architecture: str = "wg"
    model_tag: str = "scripted"


@dataclass(frozen=True)
class TurnEvaluation:
    conversation_id: str
    turn_index: int
    evaluated: bool
    accuracy: int | None = None
    accuracy_reason: str = ""
    format_ok: int | None = None
    format_violations: tuple[str, ...] = ()
    quality: int | None = None
    quality_reason: str = ""
    judge_retries: tuple[tuple[str, int], ...] = ()
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "conversation_id": self.conversation_id,
            "turn_index": self.turn_index,
            "evaluated": self.evaluated,
            "accuracy": self.accuracy,
            "accuracy_reason": self.accuracy_reason,
            "format_ok": self.format_ok,
            "format_violations": list(self.format_violations),
            "quality": self.quality,
            "quality_reason": self.quality_reason,
            "judge_retries": dict(self.judge_retries),
            "error": self.error,
        }


@dataclass(frozen=True)
class EvalReport:
    turns: tuple[TurnEvaluation, ...]
    metadata: tuple[tuple[str, str], ...]
    excluded: int

    def aggregates(self) -> dict[str, float | None]:
        scored = [t for t in self.turns if t.evaluated]
        if not scored:
            return {"accuracy_ratio": None, "format_ratio": None, "quality_mean": None}
        return {
            "accuracy_ratio": sum(t.accuracy for t in scored) / len(scored),
            "format_ratio": sum(t.format_ok for t in scored) / len(scored),
            "quality_mean": sum(t.quality for t in scored) / len(scored),
        }

    def to_dict(self) -> dict:
        return {
            "metadata": dict(self.metadata),
            "aggregates": self.aggregates(),
            "excluded": self.excluded,
            "turn_count": len(self.turns),
            "turns": [t.to_dict() for t in self.turns],
        }


def evaluate_run(
    test_set: list[EvalConversation], agent_config: AgentConfig, judge_backend: Any
) -> EvalReport:
    """Run the agent over reference-annotated turns and score each one.

    Turn prefixes are teacher-forced from the reference messages, so every
    turn is judged independently of the agent's earlier mistakes. Turns whose
    judge output stays unparseable are excluded from the aggregates and
    surfaced in the excluded count.
    """
    graph = agent_config.graph
    limits = agent_config.limits or Limits.for_graph(graph)
    tools_desc: list[dict] | None = None
    evaluations: list[TurnEvaluation] = []
    excluded = 0

    for conversation in test_set:
        registry = agent_config.registry_factory()
        if tools_desc is None:
            tools_desc = tools_description(registry)
        prefix: list[Message] = []
        for turn_index, turn in enumerate(conversation.turns):
            request_message = user_message(turn.user_message)
            result = run_turn(
                graph, prefix, request_message, agent_config.backend, registry, limits, turn_index
            )
            actual_calls = result.trace.tool_calls()
            actual_call = actual_calls[0] if actual_calls else None
            judged_history = prefix + [request_message]
            retries: list[tuple[str, int]] = []
            try:
                if turn.reference_call is None and actual_call is None:
                    accuracy, accuracy_reason = 1, "no tool call expected or made"
                elif turn.reference_call is None or actual_call is None:
                    accuracy, accuracy_reason = 0, "tool-call presence differs from the reference"
                else:
                    verdict = judge_accuracy(
                        judge_backend, tools_desc, judged_history, turn.reference_call, actual_call
                    )
                    accuracy, accuracy_reason = verdict.score, verdict.reason
                    retries.append(("accuracy", verdict.retries))

                quality_verdict = judge_quality(
                    judge_backend,
                    judged_history,
                    result.response.rendered_content(),
                    turn.reference_response,
                )
                retries.append(("quality", quality_verdict.retries))
            except JudgeUnparseableError as err:
                excluded += 1
                evaluations.append(
                    TurnEvaluation(
                        conversation_id=conversation.id,
                        turn_index=turn_index,
                        evaluated=False,
                        error=str(err),
                    )
                )
                if turn.reference_messages:
                    prefix = prefix + list(turn.reference_messages)
                continue

            profile = _profile_for(turn, result, agent_config)
            context = TurnContext(
                tool_results=tuple(
                    (v.parsed_output["tool_call"]["name"], v.parsed_output["tool_result"])
                    for v in result.trace.visits
                    if (v.parsed_output or {}).get("type") == "tool_execution"
                )
            )
            if profile is None:
                format_ok, format_violations = 1, []
            else:
                format_ok, format_violations = check_format(profile, result.response, context)

            evaluations.append(
                TurnEvaluation(
                    conversation_id=conversation.id,
                    turn_index=turn_index,
                    evaluated=True,
                    accuracy=accuracy,
                    accuracy_reason=accuracy_reason,
                    format_ok=format_ok,
                    format_violations=tuple(str(v) for v in format_violations),
                    quality=quality_verdict.score,
                    quality_reason=quality_verdict.reason,
                    judge_retries=tuple(retries),
                )
            )
            if turn.reference_messages:
                prefix = prefix + list(turn.reference_messages)
            else:
                prefix = judged_history + [
                    Message(
                        role="assistant", content=turn.reference_response, origin_node="_reference"
                    )
                ]

    return EvalReport(
        turns=tuple(evaluations),
        metadata=(
            ("model", agent_config.model_tag),
            ("architecture", agent_config.architecture),
        ),
        excluded=excluded,
    )


def _profile_for(turn: EvalTurn, result: Any, config: AgentConfig) -> FormatProfile | None:
    ref = turn.profile_ref
    if ref is None:
        origin = result.response.origin_node
        spec = config.graph.nodes.get(origin)
        if isinstance(spec, LlmNode):
            ref = spec.format_profile_ref
    if ref is None:
        return None
    return config.format_profiles.get(ref)


def render_table(reports: list[EvalReport]) -> str:
    """Side-by-side metric table, one column per evaluated architecture."""
    headers = ["Metric"] + [dict(r.metadata).get("architecture", "?") for r in reports]
    rows = []
    for label, key in (
        ("Accuracy", "accuracy_ratio"),
        ("Format Adherence", "format_ratio"),
        ("Response Validity", "quality_mean"),
    ):
        cells = []
        for report in reports:
            value = report.aggregates()[key]
            cells.append("n/a" if value is None else f"{value:.3f}")
        rows.append([label] + cells)
    widths = [max(len(str(row[i])) for row in [headers] + rows) for i in range(len(headers))]
    lines = []
    for row in [headers] + rows:
        lines.append("  ".join(str(cell).rjust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


# --------------------------------------------------------------------------
# Architecture flattening (single monolithic prompt baseline)
# --------------------------------------------------------------------------


def build_basic_architecture(graph: WorkflowGraph) -> WorkflowGraph:
    """Collapse a workflow graph into the single-prompt baseline shape.

    All LLM-node instructions concatenate into one system prompt used by a
    lone chat node (and one respond node after tool calls); every tool stays
    available. This is the comparison baseline, not a recommended setup.
    """
    llm_nodes = [n for n in graph.nodes.values() if isinstance(n, LlmNode)]
    llm_nodes.sort(key=lambda n: n.id)
    sections = []
    for node in llm_nodes:
        sections.append(f"## Instructions ({node.id})\n{node.system_prompt}")
    monolithic = "\n\n".join(sections)
    tool_nodes = sorted(
        (n for n in graph.nodes.values() if isinstance(n, ToolNode)), key=lambda n: n.id
    )

    nodes: dict[str, Any] = {}
    edges: set[tuple[str, str]] = set()
    entry_profile = None
    entry_spec = graph.nodes.get(graph.entry)
    if isinstance(entry_spec, LlmNode):
        entry_profile = entry_spec.format_profile_ref

    nodes["chat"] = LlmNode(
        id="chat",
        system_prompt=monolithic,
        allowed_tools=tuple(n.id for n in tool_nodes),
        default_successor="final",
        format_profile_ref=entry_profile,
    )
    edges.add(("chat", "final"))
    nodes["respond"] = LlmNode(
        id="respond",
        system_prompt=monolithic,
        default_successor="final",
        format_profile_ref=entry_profile,
    )
    edges.add(("respond", "final"))
    for tool in tool_nodes:
        nodes[tool.id] = ToolNode(
            id=tool.id,
            tool_name=tool.tool_name,
            input_schema=tool.input_schema,
            output_schema=tool.output_schema,
            successor="respond",
        )
        edges.add(("chat", tool.id))
        edges.add((tool.id, "respond"))
    nodes["final"] = FinalNode(id="final")
    return WorkflowGraph(
        nodes=nodes,
        edges=frozenset(edges),
        entry="chat",
        final="final",
        schemas=dict(graph.schemas),
    )


# --------------------------------------------------------------------------
# Test sets from recorded conversations
# --------------------------------------------------------------------------


def record_to_eval_conversation(
    record: ConversationRecord, graph: WorkflowGraph
) -> EvalConversation:
    """Reviewed record -> reference-annotated eval conversation."""
    turns = []
    for turn_index, turn in enumerate(record.turns):
        reference_messages: list[Message] = [turn.user_message]
        for visit in turn.trace.visits:
            parsed = visit.parsed_output or {}
            if parsed.get("type") == "tool_call":
                reference_messages.append(
                    Message(
                        role="assistant",
                        origin_node=visit.node,
                        tool_call=ToolCall(name=parsed["name"], arguments=parsed["arguments"]),
                    )
                )
            elif parsed.get("type") == "tool_execution":
                reference_messages.append(
                    Message(
                        role="tool",
                        content=_compact(parsed["tool_result"]),
                        origin_node=visit.node,
                        tool_result=parsed["tool_result"],
                    )
                )
        reference_messages.append(
            Message(
                role="assistant",
                content=record.corrected_response_text(turn_index),
                origin_node=turn.response.origin_node or "_reference",
            )
        )
        profile_ref = None
        spec = graph.nodes.get(turn.response.origin_node or "")
        if isinstance(spec, LlmNode):
            profile_ref = spec.format_profile_ref
        turns.append(
            EvalTurn(
                user_message=turn.user_message.content,
                reference_response=record.corrected_response_text(turn_index),
                reference_call=record.corrected_tool_call(turn_index),
                profile_ref=profile_ref,
                reference_messages=tuple(reference_messages),
            )
        )
    return EvalConversation(id=record.id, turns=tuple(turns))
