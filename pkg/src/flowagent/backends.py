"""LLM backend contract and implementations.

Two complete() providers ship in-tree: a deterministic scripted backend used
by fixtures and tests, and an HTTP backend speaking the chat-completions wire
shape. A judge() helper wraps any backend with score-line parsing and bounded
retries, and a fault-injection wrapper models the accuracy decay of very long
monolithic prompts for architecture comparisons.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Protocol

import httpx

from .grammar import Grammar, compile_grammar, recognize
from .messages import Message, user_message
from .schema import parse_schema, schema_to_dict


class BackendError(Exception):
    pass


class BackendUnavailableError(BackendError):
    pass


class NoConformingOutputError(BackendError):
    """Scripted backend had no output satisfying the constraint."""


class JudgeUnparseableError(BackendError):
    def __init__(self, attempts: int, last_raw: str):
        self.attempts = attempts
        self.last_raw = last_raw
        super().__init__(f"judge output unparseable after {attempts} attempts")


@dataclass(frozen=True)
class DecodeParams:
    temperature: float = 0.7
    max_output_chars: int = 2000


@dataclass(frozen=True)
class BackendRequest:
    system_prompt: str
    messages: tuple[Message, ...] = ()
    constraint: Grammar | None = None
    decode_params: DecodeParams = DecodeParams()
    node_id: str | None = None

    def last_observation(self) -> str:
        """Content of the most recent user or tool message (matcher target)."""
        for message in reversed(self.messages):
            if message.role in ("user", "tool"):
                return message.content
        return ""


class Backend(Protocol):
    def complete(self, request: BackendRequest) -> str: ...


# --------------------------------------------------------------------------
# Scripted backend
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ScriptedRule:
    node: str | None = None
    contains: str | None = None
    equals: str | None = None
    outputs: tuple[str, ...] = ()

    def matches(self, request: BackendRequest) -> bool:
        if self.node is not None and request.node_id != self.node:
            return False
        observation = request.last_observation()
        if self.contains is not None and self.contains not in observation:
            return False
        if self.equals is not None and observation != self.equals:
            return False
        return True


@dataclass(frozen=True)
class ScriptedBackend:
    """Deterministic request->output mapping: first matching rule wins.

    Under a decoding constraint the matching rules' outputs (then the default)
    are filtered for the first one the grammar recognizes, which models
    constrained decoding on a test double.
    """

    rules: tuple[ScriptedRule, ...] = ()
    default_output: str = ""

    def complete(self, request: BackendRequest) -> str:
        candidates = [
            output for rule in self.rules if rule.matches(request) for output in rule.outputs
        ]
        candidates.append(self.default_output)
        if request.constraint is None:
            return candidates[0]
        for candidate in candidates:
            if recognize(request.constraint, candidate.strip()):
                return candidate
        raise NoConformingOutputError(
            f"no scripted output satisfies the constraint (node={request.node_id})"
        )

    @classmethod
    def from_dict(cls, doc: dict) -> "ScriptedBackend":
        unknown = set(doc) - {"rules", "default_output"}
        if unknown:
            raise ValueError(f"unknown scripted backend keys: {sorted(unknown)}")
        rules = []
        for rule_doc in doc.get("rules", []):
            unknown = set(rule_doc) - {"node", "contains", "equals", "output"}
            if unknown:
                raise ValueError(f"unknown scripted rule keys: {sorted(unknown)}")
            output = rule_doc.get("output", "")
            outputs = tuple(output) if isinstance(output, list) else (output,)
            rules.append(
                ScriptedRule(
                    node=rule_doc.get("node"),
                    contains=rule_doc.get("contains"),
                    equals=rule_doc.get("equals"),
                    outputs=outputs,
                )
            )
        return cls(rules=tuple(rules), default_output=doc.get("default_output", ""))

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# --------------------------------------------------------------------------
# HTTP backend (chat-completions wire shape)
# --------------------------------------------------------------------------


def render_backend_request(request: BackendRequest, model: str | None = None) -> dict:
    """Wire form of a request: role-tagged messages plus decode parameters."""
    messages = [{"role": "system", "content": request.system_prompt}]
    messages += [
        {"role": m.role, "content": m.rendered_content()} for m in request.messages
    ]
    doc: dict[str, Any] = {
        "messages": messages,
        "temperature": request.decode_params.temperature,
        "max_tokens": request.decode_params.max_output_chars,
    }
    if request.constraint is not None:
        doc["response_format"] = {
            "type": "json_schema",
            "schema": schema_to_dict(request.constraint.source_schema),
        }
    if model is not None:
        doc["model"] = model
    return doc


def parse_rendered_request(doc: dict) -> BackendRequest:
    """Inverse of render_backend_request (modulo node_id, which never leaves the engine)."""
    messages = doc["messages"]
    if not messages or messages[0]["role"] != "system":
        raise ValueError("rendered request must start with a system message")
    constraint = None
    if "response_format" in doc:
        constraint = compile_grammar(parse_schema(doc["response_format"]["schema"]))
    parsed = []
    for m in messages[1:]:
        if m["role"] == "tool":
            parsed.append(Message(role="tool", content=m["content"], tool_result=m["content"]))
        else:
            parsed.append(Message(role=m["role"], content=m["content"], origin_node="_wire"))
    return BackendRequest(
        system_prompt=messages[0]["content"],
        messages=tuple(parsed),
        constraint=constraint,
        decode_params=DecodeParams(
            temperature=doc["temperature"], max_output_chars=doc["max_tokens"]
        ),
    )


@dataclass
class HttpBackend:
    """Client for chat-completions-style servers."""

    base_url: str
    path: str = "/v1/chat/completions"
    model: str | None = None
    auth_header_name: str | None = None
    auth_header_value: str | None = None
    timeout: float = 60.0
    client: httpx.Client | None = None

    def complete(self, request: BackendRequest) -> str:
        payload = render_backend_request(request, model=self.model)
        headers = {}
        if self.auth_header_name:
            headers[self.auth_header_name] = self.auth_header_value or ""
        client = self.client or httpx.Client(timeout=self.timeout)
        try:
            response = client.post(
                self.base_url.rstrip("/") + self.path, json=payload, headers=headers
            )
            response.raise_for_status()
            data = response.json()
        except httpx.HTTPError as err:
            raise BackendUnavailableError(f"backend unavailable: {err}") from err
        finally:
            if self.client is None:
                client.close()
        try:
            return data["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as err:
            raise BackendUnavailableError(f"malformed backend response: {err}") from err


# --------------------------------------------------------------------------
# Fault injection (long-prompt degradation model)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FaultInjectionBackend:
    """Wraps a backend and corrupts outputs under long system prompts.

    Corruption is a pure function of (request, seed), so runs are exactly
    reproducible. Short node-sized prompts pass through untouched, which is
    the behavioral contrast between a distributed-prompt graph architecture
    and one monolithic concatenated prompt.
    """

    inner: Any
    prompt_length_threshold: int = 2000
    error_rate: float = 0.3
    seed: int = 0
    corrupted_output: str = "- option one\n- option two\n- option 0teqpxf zzz zzz zzz"

    def complete(self, request: BackendRequest) -> str:
        if len(request.system_prompt) > self.prompt_length_threshold:
            digest = hashlib.sha256(
                f"{self.seed}|{request.node_id}|{request.last_observation()}".encode("utf-8")
            ).digest()
            fraction = int.from_bytes(digest[:4], "big") / 2**32
            if fraction < self.error_rate:
                return self.corrupted_output
        return self.inner.complete(request)


# --------------------------------------------------------------------------
# Judge wrapper
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ParseSpec:
    allowed_scores: tuple[int, ...]


@dataclass(frozen=True)
class JudgeResult:
    reason: str
    score: int
    retries: int


_REASON_LINE = re.compile(r"^\s*-\s*Reason:\s*(?P<reason>.*\S)\s*$", re.MULTILINE)
_SCORE_LINE = re.compile(r"^\s*-\s*Score:\s*(?P<score>-?\d+)\s*$", re.MULTILINE)

_JUDGE_MAX_ATTEMPTS = 5
_RETRY_NUDGE = (
    "Your previous reply could not be parsed. Respond with exactly two lines:\n"
    "- Reason: <reason>\n- Score: <score>"
)


def parse_judge_output(raw: str, spec: ParseSpec) -> tuple[str, int] | None:
    reason_match = _REASON_LINE.search(raw)
    score_match = _SCORE_LINE.search(raw)
    if not reason_match or not score_match:
        return None
    score = int(score_match.group("score"))
    if score not in spec.allowed_scores:
        return None
    return reason_match.group("reason"), score


def judge(backend: Any, judge_prompt: str, payload: str, parse_spec: ParseSpec) -> JudgeResult:
    """Score a payload with a rubric prompt; bounded retries on unparseable output.

    Each retry appends the unparseable reply and a format nudge, so scripted
    backends can deterministically exercise the retry path.
    """
    messages: list[Message] = [user_message(payload)]
    last_raw = ""
    for attempt in range(_JUDGE_MAX_ATTEMPTS):
        request = BackendRequest(
            system_prompt=judge_prompt,
            messages=tuple(messages),
            decode_params=DecodeParams(temperature=0.0),
            node_id="judge",
        )
        last_raw = backend.complete(request)
        parsed = parse_judge_output(last_raw, parse_spec)
        if parsed is not None:
            reason, score = parsed
            return JudgeResult(reason=reason, score=score, retries=attempt)
        messages.append(Message(role="assistant", content=last_raw or " ", origin_node="judge"))
        messages.append(user_message(_RETRY_NUDGE))
    raise JudgeUnparseableError(_JUDGE_MAX_ATTEMPTS, last_raw)
