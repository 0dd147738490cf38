"""Operator command line: validate, chat, serve, replay, export, eval."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .backends import ScriptedBackend
from .config import ConfigError, build_runtime, example_config_path, load_config
from .dataset import export_dataset, load_sequences
from .engine import run_turn
from .evaluation import (
    AgentConfig,
    EvalConversation,
    EvalTurn,
    build_basic_architecture,
    evaluate_run,
    load_judge_backend,
    record_to_eval_conversation,
    render_table,
)
from .graph import GraphLoadError, load_graph, validate_graph
from .messages import ToolCall, user_message


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="flowagent", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a workflow graph file")
    p_validate.add_argument("--graph", help="graph JSON file (defaults to the bundled example)")
    p_validate.add_argument("--config", help="take the graph from a config file")

    p_chat = sub.add_parser("chat", help="interactive session on stdin/stdout")
    _add_runtime_args(p_chat)
    p_chat.add_argument("--show-trace", action="store_true", help="print the visit path per turn")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    _add_runtime_args(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8800)

    p_replay = sub.add_parser("replay", help="re-run a recorded conversation and diff traces")
    _add_runtime_args(p_replay)
    p_replay.add_argument("--conversation", required=True, help="conversation id in the store")

    p_export = sub.add_parser("export", help="export the loss-masked training dataset")
    _add_runtime_args(p_export)
    p_export.add_argument("--status", default="reviewed")
    p_export.add_argument("--out", default=None, help="output JSONL path")

    p_eval = sub.add_parser("eval", help="run the turn-level evaluation harness")
    _add_runtime_args(p_eval)
    p_eval.add_argument("--status", default="reviewed", help="store status filter for the test set")
    p_eval.add_argument("--turns", default=None, help="labeled turns fixture instead of the store")
    p_eval.add_argument("--scripted-judge", default=None, help="judge backend fixture JSON")
    p_eval.add_argument(
        "--architecture",
        default="wg",
        choices=["wg", "basic", "both"],
        help="agent architecture(s) to evaluate",
    )
    p_eval.add_argument("--json", action="store_true", help="print the full report as JSON")

    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, GraphLoadError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def _add_runtime_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="config file (defaults to the bundled example)")
    parser.add_argument("--graph", default=None, help="override the graph file")
    parser.add_argument("--backend", default=None, help="override backend: http base URL")
    parser.add_argument("--scripted-backend", default=None, help="override backend: scripted fixture")
    parser.add_argument("--store-dir", default=None, help="override the conversation store directory")


def _runtime(args: argparse.Namespace):
    config_path = Path(args.config) if args.config else example_config_path()
    config = load_config(config_path, store_dir=args.store_dir)
    runtime = build_runtime(config)
    if args.graph:
        runtime.graph = load_graph(args.graph)
    if getattr(args, "scripted_backend", None):
        runtime.backend = ScriptedBackend.from_file(args.scripted_backend)
    elif getattr(args, "backend", None):
        from .config import build_backend

        runtime.backend = build_backend({"type": "http", "base_url": args.backend})
    return runtime


def _cmd_validate(args: argparse.Namespace) -> int:
    if args.graph:
        graph_path = Path(args.graph)
    elif args.config:
        graph_path = load_config(args.config).graph_path
    else:
        graph_path = load_config(example_config_path()).graph_path
    try:
        graph = load_graph(graph_path)
    except GraphLoadError as err:
        print(f"graph invalid: {err}")
        return 1
    violations = validate_graph(graph)
    if violations:
        for violation in violations:
            print(violation)
        return 1
    print(f"graph valid: {len(graph.nodes)} nodes, {len(graph.edges)} edges")
    return 0


def _cmd_chat(args: argparse.Namespace) -> int:
    runtime = _runtime(args)
    ledger: list = []
    registry = runtime.new_registry(ledger)
    history: list = []
    turn_index = 0
    print("flowagent chat (EOF to exit)")
    while True:
        try:
            line = input("you> ")
        except EOFError:
            print()
            return 0
        if not line.strip():
            continue
        result = run_turn(
            runtime.graph,
            history,
            user_message(line),
            runtime.backend,
            registry,
            runtime.limits,
            turn_index,
        )
        history = result.updated_history
        turn_index += 1
        print(f"agent> {result.response.rendered_content()}")
        if args.show_trace:
            print(f"trace> {' -> '.join(v.node for v in result.trace.visits)}")


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    runtime = _runtime(args)
    app = create_app(runtime)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    runtime = _runtime(args)
    store = runtime.store
    record = store.get(args.conversation)
    history: list = []
    registry = runtime.new_registry()
    mismatches = 0
    for turn_index, turn in enumerate(record.turns):
        result = run_turn(
            runtime.graph,
            history,
            turn.user_message,
            runtime.backend,
            registry,
            runtime.limits,
            turn_index,
        )
        history = result.updated_history
        original = turn.trace.to_json()
        replayed = result.trace.to_json()
        if original == replayed:
            print(f"turn {turn_index}: identical")
        else:
            mismatches += 1
            original_path = [v.node for v in turn.trace.visits]
            replayed_path = [v.node for v in result.trace.visits]
            print(f"turn {turn_index}: DIFFERS")
            print(f"  recorded visits: {' -> '.join(original_path)}")
            print(f"  replayed visits: {' -> '.join(replayed_path)}")
    return 1 if mismatches else 0


def _cmd_export(args: argparse.Namespace) -> int:
    runtime = _runtime(args)
    destination = Path(args.out) if args.out else runtime.config.export_dir / "dataset.jsonl"
    summary = export_dataset(runtime.store, runtime.graph, destination, status=args.status)
    recount = _recount(destination)
    print(json.dumps({"summary": summary.to_dict(), "path": str(destination)}, ensure_ascii=False))
    if recount != (summary.sequences, summary.trained_positions, summary.masked_positions):
        print("error: export summary disagrees with the written file", file=sys.stderr)
        return 1
    return 0


def _recount(path: Path) -> tuple[int, int, int]:
    sequences = trained = masked = 0
    for line in load_sequences(path):
        sequences += 1
        for message in line["messages"]:
            if message["train"]:
                trained += 1
            elif message["role"] == "assistant":
                masked += 1
    return sequences, trained, masked


def _load_eval_turns(path: str | Path) -> list[EvalConversation]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    conversations = []
    for turn in doc["turns"]:
        call = turn.get("reference_call")
        conversations.append(
            EvalConversation(
                id=turn["id"],
                turns=(
                    EvalTurn(
                        user_message=turn["user_message"],
                        reference_response=turn["reference_response"],
                        reference_call=ToolCall(call["name"], call["arguments"]) if call else None,
                        profile_ref=turn.get("profile"),
                    ),
                ),
            )
        )
    return conversations


def _cmd_eval(args: argparse.Namespace) -> int:
    runtime = _runtime(args)
    if args.turns:
        test_set = _load_eval_turns(args.turns)
    else:
        test_set = [
            record_to_eval_conversation(runtime.store.get(cid), runtime.graph)
            for cid in runtime.store.list_ids(status=args.status)
        ]
    judge_backend = (
        load_judge_backend(args.scripted_judge) if args.scripted_judge else runtime.judge_backend
    )
    architectures = ["wg", "basic"] if args.architecture == "both" else [args.architecture]
    reports = []
    for architecture in architectures:
        graph = runtime.graph if architecture == "wg" else build_basic_architecture(runtime.graph)
        agent = AgentConfig(
            graph=graph,
            backend=runtime.backend,
            registry_factory=lambda: runtime.new_registry(),
            format_profiles=runtime.format_profiles,
            architecture=architecture,
        )
        reports.append(evaluate_run(test_set, agent, judge_backend))
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], ensure_ascii=False, indent=2))
    else:
        print(render_table(reports))
        for report in reports:
            if report.excluded:
                arch = dict(report.metadata).get("architecture")
                print(f"note: {report.excluded} turn(s) excluded as unevaluable ({arch})")
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "chat": _cmd_chat,
    "serve": _cmd_serve,
    "replay": _cmd_replay,
    "export": _cmd_export,
    "eval": _cmd_eval,
}


if __name__ == "__main__":
    sys.exit(main())
