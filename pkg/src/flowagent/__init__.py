"""Workflow-graph runtime for tool-calling conversational agents."""

from .backends import (
    BackendRequest,
    DecodeParams,
    HttpBackend,
    JudgeResult,
    ParseSpec,
    ScriptedBackend,
    judge,
)
from .dataset import TrainingSequence, build_training_sequences, export_dataset
from .engine import Limits, TraversalTrace, TurnResult, apply_history_policy, run_turn
from .evaluation import (
    AgentConfig,
    EvalConversation,
    EvalReport,
    EvalTurn,
    FormatProfile,
    RubricJudge,
    check_format,
    evaluate_run,
    judge_accuracy,
    judge_quality,
)
from .grammar import Grammar, compile_grammar, recognize
from .graph import WorkflowGraph, load_graph, serialize_graph, validate_graph
from .messages import Message, ToolCall, user_message
from .recorder import Correction, RecordStore
from .schema import SchemaNode, canonical_json, parse_schema, validate_value
from .tools import Catalog, ToolRegistry, build_registry, execute_tool, load_catalog

__all__ = [
    "AgentConfig",
    "BackendRequest",
    "Catalog",
    "Correction",
    "DecodeParams",
    "EvalConversation",
    "EvalReport",
    "EvalTurn",
    "FormatProfile",
    "Grammar",
    "HttpBackend",
    "JudgeResult",
    "Limits",
    "Message",
    "ParseSpec",
    "RecordStore",
    "RubricJudge",
    "SchemaNode",
    "ScriptedBackend",
    "ToolCall",
    "ToolRegistry",
    "TrainingSequence",
    "TraversalTrace",
    "TurnResult",
    "WorkflowGraph",
    "apply_history_policy",
    "build_registry",
    "build_training_sequences",
    "canonical_json",
    "check_format",
    "compile_grammar",
    "evaluate_run",
    "execute_tool",
    "export_dataset",
    "judge",
    "judge_accuracy",
    "judge_quality",
    "load_catalog",
    "load_graph",
    "parse_schema",
    "recognize",
    "run_turn",
    "serialize_graph",
    "user_message",
    "validate_graph",
    "validate_value",
]
