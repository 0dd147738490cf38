"""Per-node training sequences with loss masks, and JSONL dataset export.

A conversation touching several LLM nodes yields one sequence per node: the
node's own system prompt followed by the conversation rendered for that node,
with train flags set exactly on the assistant messages that node generated.
Responses originating from other nodes stay in context but are masked, so no
sequence ever trains a response under a mismatched system prompt.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .graph import LlmNode, WorkflowGraph
from .messages import Message, ToolCall, assistant_call, assistant_text
from .recorder import ConversationRecord, RecordStore
from .engine import apply_history_policy


class DatasetError(Exception):
    pass


class UnreviewedRecordError(DatasetError):
    pass


class InconsistentRecordError(DatasetError):
    """Tool arguments were corrected without re-executing the tool."""


@dataclass(frozen=True)
class SequenceMessage:
    role: str
    content: str
    node: str | None
    train: bool

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content, "node": self.node, "train": self.train}


@dataclass(frozen=True)
class TrainingSequence:
    node: str
    messages: tuple[SequenceMessage, ...]

    def to_dict(self) -> dict:
        return {"node": self.node, "messages": [m.to_dict() for m in self.messages]}


def conversation_messages(record: ConversationRecord, graph: WorkflowGraph) -> list[Message]:
    """Rebuild the corrected message stream from a record's traces.

    Turns with an accepted route-choice correction are dropped entirely: the
    recorded path is known-wrong and the right path's outputs were never
    produced, so nothing from that turn may be trained on.
    """
    messages: list[Message] = []
    for turn_index, turn in enumerate(record.turns):
        if any(c.target == "route_choice" for c in record.corrections_for(turn_index)):
            continue
        corrected_call = record.corrected_tool_call(turn_index)
        corrected_text = record.corrected_response_text(turn_index)
        reexecuted = None
        for c in record.corrections_for(turn_index):
            if c.target == "tool_call_arguments" and c.reexecuted_result is not None:
                reexecuted = c.reexecuted_result

        turn_messages: list[Message] = [turn.user_message]
        first_call_seen = False
        first_result_seen = False
        for visit in turn.trace.visits:
            parsed = visit.parsed_output or {}
            kind = parsed.get("type")
            if kind == "tool_call":
                call = ToolCall(name=parsed["name"], arguments=parsed["arguments"])
                if not first_call_seen and corrected_call is not None:
                    call = corrected_call
                    first_call_seen = True
                turn_messages.append(assistant_call(visit.node, call))
            elif kind == "tool_execution":
                result = parsed["tool_result"]
                if not first_result_seen and reexecuted is not None:
                    result = reexecuted
                    first_result_seen = True
                turn_messages.append(
                    Message(
                        role="tool",
                        content=json.dumps(
                            result, ensure_ascii=False, sort_keys=True, separators=(",", ":")
                        ),
                        origin_node=visit.node,
                        tool_result=result,
                    )
                )
            elif kind == "text":
                turn_messages.append(assistant_text(visit.node, parsed["content"]))

        # The turn's response is its last assistant text; corrections replace it.
        for i in range(len(turn_messages) - 1, -1, -1):
            m = turn_messages[i]
            if m.role == "assistant" and m.content:
                turn_messages[i] = assistant_text(m.origin_node, corrected_text)
                break
        messages.extend(turn_messages)
    return messages


def _is_keep_all(node: LlmNode) -> bool:
    return all(d.op == "keep_all" for d in node.history_policy)


def build_training_sequences(
    record: ConversationRecord, graph: WorkflowGraph
) -> list[TrainingSequence]:
    """One loss-masked sequence per LLM node that spoke in the conversation.

    Nodes with a plain keep-all policy get the full conversation (foreign
    responses masked). Nodes with a filtering policy get the view they saw at
    their last generation: the policy applied to the preceding history, then
    the generated message itself, so training inputs equal inference inputs.
    """
    if record.status != "reviewed":
        raise UnreviewedRecordError(f"conversation {record.id!r} is not reviewed")
    if record.inconsistent_turns():
        raise InconsistentRecordError(
            f"conversation {record.id!r} has corrected tool calls without re-executed results"
        )
    messages = conversation_messages(record, graph)
    sequences = []
    for node_id in sorted(graph.nodes):
        node = graph.nodes[node_id]
        if not isinstance(node, LlmNode):
            continue
        own_positions = [
            i for i, m in enumerate(messages) if m.role == "assistant" and m.origin_node == node_id
        ]
        if not own_positions:
            continue
        if _is_keep_all(node):
            visible = messages
        else:
            last = own_positions[-1]
            visible = apply_history_policy(node.history_policy, messages[:last]) + [messages[last]]
        rendered = [SequenceMessage(role="system", content=node.system_prompt, node=node_id, train=False)]
        rendered += [
            SequenceMessage(
                role=m.role,
                content=m.rendered_content(),
                node=m.origin_node,
                train=m.role == "assistant" and m.origin_node == node_id,
            )
            for m in visible
        ]
        sequences.append(TrainingSequence(node=node_id, messages=tuple(rendered)))
    return sequences


@dataclass(frozen=True)
class ExportSummary:
    conversations: int
    sequences: int
    trained_positions: int
    masked_positions: int
    skipped_inconsistent: int

    def to_dict(self) -> dict:
        return {
            "conversations": self.conversations,
            "sequences": self.sequences,
            "trained_positions": self.trained_positions,
            "masked_positions": self.masked_positions,
            "skipped_inconsistent": self.skipped_inconsistent,
        }


def export_dataset(
    store: RecordStore,
    graph: WorkflowGraph,
    destination: str | Path,
    status: str = "reviewed",
) -> ExportSummary:
    """Write one TrainingSequence per JSONL line, deterministically ordered.

    Ordering is (conversation id, node id); identical store contents always
    produce byte-identical files. ``masked_positions`` counts assistant
    messages excluded from the loss; inputs (user/tool/system) are not counted.
    """
    destination = Path(destination)
    destination.parent.mkdir(parents=True, exist_ok=True)
    conversations = sequences = trained = masked = skipped = 0
    lines: list[str] = []
    for conversation_id in store.list_ids():
        record = store.get(conversation_id)
        if record.status != status:
            continue
        if record.inconsistent_turns():
            skipped += 1
            continue
        conversations += 1
        for sequence in build_training_sequences(record, graph):
            sequences += 1
            for m in sequence.messages:
                if m.train:
                    trained += 1
                elif m.role == "assistant":
                    masked += 1
            lines.append(
                json.dumps(
                    {"conversation_id": conversation_id, **sequence.to_dict()},
                    ensure_ascii=False,
                    sort_keys=True,
                    separators=(",", ":"),
                )
            )
    destination.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return ExportSummary(
        conversations=conversations,
        sequences=sequences,
        trained_positions=trained,
        masked_positions=masked,
        skipped_inconsistent=skipped,
    )


def load_sequences(path: str | Path) -> list[dict]:
    """Parse an exported dataset file back into dicts (for audits and tests)."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(json.loads(line))
    return out
