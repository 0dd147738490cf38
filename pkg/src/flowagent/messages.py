"""Conversation messages and tool calls shared across the runtime."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .graph import ROLES

TOOL_CALL_OPEN = "<tool_call>"
TOOL_CALL_CLOSE = "</tool_call>"


@dataclass(frozen=True)
class ToolCall:
    name: str
    arguments: Any

    def to_envelope(self) -> str:
        payload = json.dumps(
            {"name": self.name, "arguments": self.arguments},
            ensure_ascii=False,
            sort_keys=True,
            separators=(",", ":"),
        )
        return f"{TOOL_CALL_OPEN}{payload}{TOOL_CALL_CLOSE}"

    def to_dict(self) -> dict:
        return {"name": self.name, "arguments": self.arguments}


@dataclass(frozen=True)
class Message:
    role: str
    content: str = ""
    origin_node: str | None = None
    tool_call: ToolCall | None = None
    tool_result: Any = None

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if self.role == "assistant":
            if self.origin_node is None:
                raise ValueError("assistant messages need an origin node")
            if bool(self.content) == bool(self.tool_call is not None):
                raise ValueError("assistant messages carry exactly one of text or tool call")
        if self.role == "tool" and self.tool_result is None:
            raise ValueError("tool messages need a tool result")

    def rendered_content(self) -> str:
        """Textual surface of the message (tool calls render as envelopes)."""
        if self.tool_call is not None:
            return self.tool_call.to_envelope()
        return self.content

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"role": self.role, "content": self.content}
        if self.origin_node is not None:
            out["origin_node"] = self.origin_node
        if self.tool_call is not None:
            out["tool_call"] = self.tool_call.to_dict()
        if self.role == "tool":
            out["tool_result"] = self.tool_result
        return out


def message_from_dict(doc: dict) -> Message:
    call_doc = doc.get("tool_call")
    call = ToolCall(name=call_doc["name"], arguments=call_doc["arguments"]) if call_doc else None
    return Message(
        role=doc["role"],
        content=doc.get("content", ""),
        origin_node=doc.get("origin_node"),
        tool_call=call,
        tool_result=doc.get("tool_result"),
    )


def user_message(text: str) -> Message:
    return Message(role="user", content=text)


def system_message(text: str) -> Message:
    return Message(role="system", content=text)


def assistant_text(node_id: str, text: str) -> Message:
    return Message(role="assistant", content=text, origin_node=node_id)


def assistant_call(node_id: str, call: ToolCall) -> Message:
    return Message(role="assistant", origin_node=node_id, tool_call=call)


def tool_result_message(node_id: str, result: Any) -> Message:
    content = json.dumps(result, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    return Message(role="tool", content=content, origin_node=node_id, tool_result=result)
