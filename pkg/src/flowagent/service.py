"""HTTP service: sessions, traces, corrections, dataset export, evaluation.

Sessions are confined: each has its own history and purchase ledger, and
message handling per session is serialized (queued by default, or rejected
with a busy error when configured). Every 4xx body carries a machine-readable
code from the closed ErrorCode enumeration.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field as dataclass_field
from datetime import datetime, timezone
from enum import Enum
from typing import Any

from fastapi import Depends, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .backends import BackendUnavailableError
from .config import Runtime, ServiceConfig, build_runtime
from .dataset import export_dataset
from .engine import EngineError, Limits, run_turn
from .evaluation import (
    AgentConfig,
    build_basic_architecture,
    evaluate_run,
    record_to_eval_conversation,
)
from .messages import user_message
from .recorder import (
    Correction,
    CorrectionRejectedError,
    RecorderError,
    UnknownConversationError,
    UnknownTurnError,
)
from .messages import ToolCall
from .tools import ToolError, ToolRegistry, execute_tool


class ErrorCode(str, Enum):
    unauthorized = "unauthorized"
    unknown_session = "unknown_session"
    unknown_conversation = "unknown_conversation"
    unknown_turn = "unknown_turn"
    schema_violation = "schema_violation"
    invalid_request = "invalid_request"
    session_busy = "session_busy"
    backend_unavailable = "backend_unavailable"
    engine_failure = "engine_failure"


class ApiError(Exception):
    def __init__(self, status: int, code: ErrorCode, message: str, extra: dict | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.extra = extra or {}
        super().__init__(message)


@dataclass
class Session:
    session_id: str
    history: list = dataclass_field(default_factory=list)
    purchase_ledger: list = dataclass_field(default_factory=list)
    registry: ToolRegistry | None = None
    turn_count: int = 0
    created_at: str = ""
    lock: threading.Lock = dataclass_field(default_factory=threading.Lock)


class MessageIn(BaseModel):
    content: str


class CorrectionIn(BaseModel):
    turn_index: int
    target: str
    replacement: Any
    annotator_note: str = ""
    reexecute: bool = False


class StatusIn(BaseModel):
    status: str


class ExportIn(BaseModel):
    status: str = "reviewed"
    destination: str | None = None


class EvalIn(BaseModel):
    status: str = "reviewed"
    architecture: str = "wg"


def create_app(runtime: Runtime) -> FastAPI:
    app = FastAPI(title="flowagent", docs_url=None, redoc_url=None)
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()

    def require_auth(request: Request) -> None:
        token = runtime.config.auth_token
        if not token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise ApiError(401, ErrorCode.unauthorized, "missing or invalid bearer token")

    auth = Depends(require_auth)

    @app.exception_handler(ApiError)
    async def on_api_error(_request: Request, err: ApiError) -> JSONResponse:
        body = {"error": {"code": err.code.value, "message": err.message, **err.extra}}
        return JSONResponse(status_code=err.status, content=body)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(_request: Request, err: RequestValidationError) -> JSONResponse:
        body = {"error": {"code": ErrorCode.invalid_request.value, "message": str(err.errors())}}
        return JSONResponse(status_code=422, content=body)

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise ApiError(404, ErrorCode.unknown_session, f"unknown session {session_id!r}")
        return session

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/sessions", dependencies=[auth])
    def create_session() -> dict:
        with sessions_lock:
            session_id = f"s{len(sessions) + 1:04d}"
            ledger: list = []
            sessions[session_id] = Session(
                session_id=session_id,
                purchase_ledger=ledger,
                registry=runtime.new_registry(ledger),
                created_at=datetime.now(timezone.utc).isoformat(),
            )
        return {"session_id": session_id}

    @app.post("/sessions/{session_id}/messages", dependencies=[auth])
    def post_message(session_id: str, body: MessageIn) -> dict:
        session = get_session(session_id)
        blocking = runtime.config.session_busy_policy == "queue"
        if not session.lock.acquire(blocking=blocking):
            raise ApiError(409, ErrorCode.session_busy, "a turn is already running for this session")
        try:
            message = user_message(body.content)
            try:
                result = run_turn(
                    runtime.graph,
                    session.history,
                    message,
                    runtime.backend,
                    session.registry,
                    runtime.limits,
                    turn_index=session.turn_count,
                )
            except BackendUnavailableError as err:
                raise ApiError(502, ErrorCode.backend_unavailable, str(err))
            except EngineError as err:
                raise ApiError(502, ErrorCode.engine_failure, str(err))
            runtime.store.record_turn(session_id, message, result.trace, result.response)
            session.history = result.updated_history
            turn_index = session.turn_count
            session.turn_count += 1
        finally:
            session.lock.release()
        return {
            "response": result.response.to_dict(),
            "trace_id": f"{session_id}/{turn_index}",
            "turn_index": turn_index,
        }

    @app.get("/sessions/{session_id}/trace/{turn_index}", dependencies=[auth])
    def get_trace(session_id: str, turn_index: int) -> Response:
        if not runtime.store.exists(session_id):
            raise ApiError(404, ErrorCode.unknown_session, f"unknown session {session_id!r}")
        record = runtime.store.get(session_id)
        if not 0 <= turn_index < len(record.turns):
            raise ApiError(404, ErrorCode.unknown_turn, f"no turn {turn_index}")
        payload = json.dumps(
            record.turns[turn_index].trace.to_dict(),
            ensure_ascii=False,
            sort_keys=True,
            separators=(",", ":"),
        )
        return Response(content=payload, media_type="application/json")

    @app.get("/conversations", dependencies=[auth])
    def list_conversations(status: str | None = None) -> dict:
        rows = []
        for conversation_id in runtime.store.list_ids():
            record = runtime.store.get(conversation_id)
            if status is not None and record.status != status:
                continue
            rows.append(
                {
                    "id": conversation_id,
                    "status": record.status,
                    "turns": len(record.turns),
                    "corrections": len(record.corrections),
                }
            )
        return {"conversations": rows}

    @app.get("/conversations/{conversation_id}", dependencies=[auth])
    def get_conversation(conversation_id: str) -> dict:
        try:
            record = runtime.store.get(conversation_id)
        except UnknownConversationError as err:
            raise ApiError(404, ErrorCode.unknown_conversation, str(err))
        return {
            "id": record.id,
            "status": record.status,
            "turns": [
                {
                    "turn_index": i,
                    "user_message": turn.user_message.to_dict(),
                    "response": turn.response.to_dict(),
                    "corrected_response": record.corrected_response_text(i),
                    "tool_call": (
                        record.corrected_tool_call(i).to_dict()
                        if record.corrected_tool_call(i)
                        else None
                    ),
                    "trace": turn.trace.to_dict(),
                }
                for i, turn in enumerate(record.turns)
            ],
            "corrections": [c.to_dict() for c in record.corrections],
        }

    @app.post("/conversations/{conversation_id}/corrections", dependencies=[auth])
    def post_correction(conversation_id: str, body: CorrectionIn) -> dict:
        reexecuted = None
        if body.reexecute and body.target == "tool_call_arguments":
            try:
                record = runtime.store.get(conversation_id)
            except UnknownConversationError as err:
                raise ApiError(404, ErrorCode.unknown_conversation, str(err))
            if not 0 <= body.turn_index < len(record.turns):
                raise ApiError(404, ErrorCode.unknown_turn, f"no turn {body.turn_index}")
            call = record.corrected_tool_call(body.turn_index)
            if call is None:
                raise ApiError(404, ErrorCode.unknown_turn, "turn has no tool call")
            try:
                reexecuted = execute_tool(
                    runtime.new_registry(), ToolCall(call.name, body.replacement)
                )
            except ToolError as err:
                raise ApiError(
                    422,
                    ErrorCode.schema_violation,
                    f"re-execution failed: {err}",
                )
        try:
            correction = Correction(
                turn_index=body.turn_index,
                target=body.target,
                replacement=body.replacement,
                annotator_note=body.annotator_note,
                reexecuted_result=reexecuted,
            )
        except ValueError as err:
            raise ApiError(422, ErrorCode.invalid_request, str(err))
        try:
            record = runtime.store.apply_correction(conversation_id, correction)
        except CorrectionRejectedError as err:
            raise ApiError(
                422,
                ErrorCode.schema_violation,
                "correction rejected by the argument checker",
                extra={"violations": [{"path": v.path, "reason": v.reason} for v in err.violations]},
            )
        except UnknownTurnError as err:
            raise ApiError(404, ErrorCode.unknown_turn, str(err))
        except UnknownConversationError as err:
            raise ApiError(404, ErrorCode.unknown_conversation, str(err))
        return {
            "id": record.id,
            "status": record.status,
            "corrections": len(record.corrections),
            "corrected_response": record.corrected_response_text(correction.turn_index),
        }

    @app.post("/conversations/{conversation_id}/status", dependencies=[auth])
    def post_status(conversation_id: str, body: StatusIn) -> dict:
        try:
            record = runtime.store.set_status(conversation_id, body.status)
        except UnknownConversationError as err:
            raise ApiError(404, ErrorCode.unknown_conversation, str(err))
        except RecorderError as err:
            raise ApiError(422, ErrorCode.invalid_request, str(err))
        return {"id": record.id, "status": record.status}

    @app.post("/export", dependencies=[auth])
    def post_export(body: ExportIn) -> dict:
        name = body.destination or "dataset.jsonl"
        if "/" in name or name.startswith("."):
            raise ApiError(422, ErrorCode.invalid_request, "destination must be a bare file name")
        destination = runtime.config.export_dir / name
        summary = export_dataset(runtime.store, runtime.graph, destination, status=body.status)
        return {"summary": summary.to_dict(), "path": str(destination)}

    @app.post("/eval", dependencies=[auth])
    def post_eval(body: EvalIn) -> dict:
        if body.architecture not in ("wg", "basic"):
            raise ApiError(422, ErrorCode.invalid_request, "architecture must be wg or basic")
        test_set = [
            record_to_eval_conversation(runtime.store.get(cid), runtime.graph)
            for cid in runtime.store.list_ids(status=body.status)
        ]
        graph = runtime.graph if body.architecture == "wg" else build_basic_architecture(runtime.graph)
        agent = AgentConfig(
            graph=graph,
            backend=runtime.backend,
            registry_factory=lambda: runtime.new_registry(),
            format_profiles=runtime.format_profiles,
            limits=Limits.for_graph(graph, max_retries=runtime.limits.max_retries),
            architecture=body.architecture,
        )
        report = evaluate_run(test_set, agent, runtime.judge_backend)
        return report.to_dict()

    return app


def serve(config: ServiceConfig) -> FastAPI:
    """Build the application for a config (config errors surface at startup)."""
    return create_app(build_runtime(config))
