"""Append-only conversation recording and annotator corrections.

Each conversation is one JSONL event log (turn_recorded, correction_applied,
status_changed). Nothing is ever rewritten in place: corrections are additive
layers, and readers rebuild the current view by replaying events.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .engine import TraversalTrace, trace_from_dict
from .messages import Message, ToolCall, message_from_dict
from .schema import SchemaNode, Violation, validate_value

STATUSES = ("raw", "reviewed")
CORRECTION_TARGETS = ("response_text", "tool_call_arguments", "route_choice")


class RecorderError(Exception):
    pass


class UnknownConversationError(RecorderError):
    pass


class UnknownTurnError(RecorderError):
    pass


class CorrectionRejectedError(RecorderError):
    """Correction failed the static argument check; carries the violations."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass(frozen=True)
class Correction:
    turn_index: int
    target: str
    replacement: Any
    annotator_note: str = ""
    reexecuted_result: Any = None

    def __post_init__(self) -> None:
        if self.target not in CORRECTION_TARGETS:
            raise ValueError(f"unknown correction target {self.target!r}")

    def to_dict(self) -> dict:
        return {
            "turn_index": self.turn_index,
            "target": self.target,
            "replacement": self.replacement,
            "annotator_note": self.annotator_note,
            "reexecuted_result": self.reexecuted_result,
        }


def correction_from_dict(doc: dict) -> Correction:
    return Correction(
        turn_index=doc["turn_index"],
        target=doc["target"],
        replacement=doc["replacement"],
        annotator_note=doc.get("annotator_note", ""),
        reexecuted_result=doc.get("reexecuted_result"),
    )


@dataclass(frozen=True)
class TurnRecord:
    user_message: Message
    trace: TraversalTrace
    response: Message


@dataclass
class ConversationRecord:
    id: str
    turns: list[TurnRecord] = field(default_factory=list)
    corrections: list[Correction] = field(default_factory=list)
    status: str = "raw"

    def corrections_for(self, turn_index: int) -> list[Correction]:
        return [c for c in self.corrections if c.turn_index == turn_index]

    def corrected_response_text(self, turn_index: int) -> str:
        text = self.turns[turn_index].response.rendered_content()
        for c in self.corrections_for(turn_index):
            if c.target == "response_text":
                text = c.replacement
        return text

    def corrected_tool_call(self, turn_index: int) -> ToolCall | None:
        """The turn's first tool call with argument corrections applied."""
        calls = self.turns[turn_index].trace.tool_calls()
        if not calls:
            return None
        call = calls[0]
        for c in self.corrections_for(turn_index):
            if c.target == "tool_call_arguments":
                call = ToolCall(name=call.name, arguments=c.replacement)
        return call

    def inconsistent_turns(self) -> list[int]:
        """Turns whose tool arguments were corrected without re-executing the tool.

        Their recorded results no longer match the corrected call, so they
        must never feed training data.
        """
        out = []
        for i in range(len(self.turns)):
            for c in self.corrections_for(i):
                if c.target == "tool_call_arguments" and c.reexecuted_result is None:
                    out.append(i)
                    break
        return out


class RecordStore:
    """Durable conversation store over one JSONL event log per conversation."""

    def __init__(self, root: str | Path, schema_lookup: Callable[[str], SchemaNode | None] | None = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._schema_lookup = schema_lookup

    def _log_path(self, conversation_id: str) -> Path:
        if not conversation_id or "/" in conversation_id or conversation_id.startswith("."):
            raise RecorderError(f"bad conversation id {conversation_id!r}")
        return self.root / f"{conversation_id}.jsonl"

    def _append(self, conversation_id: str, event: dict) -> None:
        line = json.dumps(event, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        with self._log_path(conversation_id).open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()

    def exists(self, conversation_id: str) -> bool:
        return self._log_path(conversation_id).exists()

    def list_ids(self, status: str | None = None) -> list[str]:
        ids = sorted(p.stem for p in self.root.glob("*.jsonl"))
        if status is None:
            return ids
        return [cid for cid in ids if self.get(cid).status == status]

    def record_turn(
        self,
        conversation_id: str,
        user_message: Message,
        trace: TraversalTrace,
        response: Message,
    ) -> None:
        self._append(
            conversation_id,
            {
                "event": "turn_recorded",
                "user_message": user_message.to_dict(),
                "trace": trace.to_dict(),
                "response": response.to_dict(),
            },
        )

    def raw_events(self, conversation_id: str) -> list[dict]:
        path = self._log_path(conversation_id)
        if not path.exists():
            raise UnknownConversationError(f"unknown conversation {conversation_id!r}")
        events = []
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    events.append(json.loads(line))
        return events

    def get(self, conversation_id: str) -> ConversationRecord:
        record = ConversationRecord(id=conversation_id)
        for event in self.raw_events(conversation_id):
            kind = event["event"]
            if kind == "turn_recorded":
                record.turns.append(
                    TurnRecord(
                        user_message=message_from_dict(event["user_message"]),
                        trace=trace_from_dict(event["trace"]),
                        response=message_from_dict(event["response"]),
                    )
                )
            elif kind == "correction_applied":
                record.corrections.append(correction_from_dict(event["correction"]))
            elif kind == "status_changed":
                record.status = event["status"]
            else:
                raise RecorderError(f"unknown event kind {kind!r}")
        return record

    def apply_correction(self, conversation_id: str, correction: Correction) -> ConversationRecord:
        """Validate and append a correction; the original stays untouched."""
        record = self.get(conversation_id)
        if not 0 <= correction.turn_index < len(record.turns):
            raise UnknownTurnError(f"conversation has no turn {correction.turn_index}")
        if correction.target == "tool_call_arguments":
            call = record.corrected_tool_call(correction.turn_index)
            if call is None:
                raise UnknownTurnError(f"turn {correction.turn_index} has no tool call to correct")
            violations = self._check_arguments(call.name, correction.replacement)
            if violations:
                raise CorrectionRejectedError(violations)
        elif correction.target == "response_text":
            if not isinstance(correction.replacement, str) or not correction.replacement.strip():
                raise CorrectionRejectedError([Violation("", "replacement text must be non-empty")])
        elif correction.target == "route_choice":
            if not isinstance(correction.replacement, str):
                raise CorrectionRejectedError([Violation("", "route replacement must be a node id")])
        self._append(
            conversation_id, {"event": "correction_applied", "correction": correction.to_dict()}
        )
        return self.get(conversation_id)

    def _check_arguments(self, tool_name: str, arguments: Any) -> list[Violation]:
        if not isinstance(arguments, dict):
            return [Violation("", "arguments must be an object")]
        if self._schema_lookup is None:
            return []
        schema = self._schema_lookup(tool_name)
        if schema is None:
            return [Violation("", f"no input schema known for tool {tool_name!r}")]
        return validate_value(schema, arguments)

    def set_status(self, conversation_id: str, status: str) -> ConversationRecord:
        if status not in STATUSES:
            raise RecorderError(f"unknown status {status!r}")
        if not self.exists(conversation_id):
            raise UnknownConversationError(f"unknown conversation {conversation_id!r}")
        self._append(conversation_id, {"event": "status_changed", "status": status})
        return self.get(conversation_id)
