"""Service configuration: one JSON document wiring graph, catalog, backends,
format profiles, limits, and storage locations."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .backends import HttpBackend, ScriptedBackend
from .engine import Limits
from .evaluation import FormatProfile, RubricJudge, load_judge_backend, parse_profiles
from .graph import WorkflowGraph, load_graph
from .recorder import RecordStore
from .tools import Catalog, ToolRegistry, build_registry, load_catalog

_TOP_KEYS = {
    "graph",
    "catalog",
    "backend",
    "judge_backend",
    "format_profiles",
    "limits",
    "auth_token",
    "store_dir",
    "export_dir",
    "session_busy_policy",
}


class ConfigError(ValueError):
    pass


def example_config_path() -> Path:
    """The bundled, ready-to-run configuration."""
    return Path(str(resources.files("flowagent") / "fixtures" / "config_example.json"))


@dataclass(frozen=True)
class ServiceConfig:
    graph_path: Path
    catalog_path: Path
    backend_doc: dict
    judge_doc: dict
    format_profiles_doc: dict
    limits_doc: dict
    auth_token: str | None
    store_dir: Path
    export_dir: Path
    session_busy_policy: str = "queue"


def load_config(
    path: str | Path,
    store_dir: str | Path | None = None,
    export_dir: str | Path | None = None,
) -> ServiceConfig:
    """Parse a config file; file references resolve relative to the config,
    while store/export directories resolve relative to the working directory
    (or the given overrides)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"malformed config: {err}") from None
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("graph", "catalog", "backend"):
        if key not in doc:
            raise ConfigError(f"missing config key {key!r}")
    base = path.parent

    def resolve(p: str | Path) -> Path:
        p = Path(p)
        return p if p.is_absolute() else base / p

    backend_doc = dict(doc["backend"])
    if "fixture" in backend_doc:
        backend_doc["fixture"] = str(resolve(backend_doc["fixture"]))
    policy = doc.get("session_busy_policy", "queue")
    if policy not in ("queue", "reject"):
        raise ConfigError(f"session_busy_policy must be queue or reject, got {policy!r}")
    return ServiceConfig(
        graph_path=resolve(doc["graph"]),
        catalog_path=resolve(doc["catalog"]),
        backend_doc=backend_doc,
        judge_doc=doc.get("judge_backend", {"type": "rubric"}),
        format_profiles_doc=doc.get("format_profiles", {}),
        limits_doc=doc.get("limits", {}),
        auth_token=doc.get("auth_token"),
        store_dir=Path(store_dir or doc.get("store_dir", "var/store")),
        export_dir=Path(export_dir or doc.get("export_dir", "var/export")),
        session_busy_policy=policy,
    )


def build_backend(doc: dict) -> Any:
    backend_type = doc.get("type")
    if backend_type == "scripted":
        if "fixture" in doc:
            return ScriptedBackend.from_file(doc["fixture"])
        return ScriptedBackend.from_dict({k: v for k, v in doc.items() if k != "type"})
    if backend_type == "http":
        return HttpBackend(
            base_url=doc["base_url"],
            path=doc.get("path", "/v1/chat/completions"),
            model=doc.get("model"),
            auth_header_name=doc.get("auth_header_name"),
            auth_header_value=doc.get("auth_header_value"),
            timeout=doc.get("timeout", 60.0),
        )
    raise ConfigError(f"unknown backend type {backend_type!r}")


def build_judge(doc: dict) -> Any:
    judge_type = doc.get("type", "rubric")
    if judge_type == "rubric":
        return RubricJudge()
    if judge_type == "rules":
        if "fixture" in doc:
            return ScriptedBackend.from_file(doc["fixture"])
        return load_judge_backend(doc)
    if judge_type == "http":
        return build_backend(doc)
    raise ConfigError(f"unknown judge backend type {judge_type!r}")


@dataclass
class Runtime:
    """Everything a service or CLI command needs, built once from config."""

    config: ServiceConfig
    graph: WorkflowGraph
    catalog: Catalog
    backend: Any
    judge_backend: Any
    format_profiles: dict[str, FormatProfile] = field(default_factory=dict)
    limits: Limits | None = None
    store: RecordStore | None = None

    def new_registry(self, ledger: list | None = None) -> ToolRegistry:
        return build_registry(self.catalog, ledger if ledger is not None else [])


def build_runtime(config: ServiceConfig) -> Runtime:
    try:
        graph = load_graph(config.graph_path)
    except Exception as err:
        raise ConfigError(f"graph: {err}") from err
    try:
        catalog = load_catalog(config.catalog_path)
    except Exception as err:
        raise ConfigError(f"catalog: {err}") from err
    registry = build_registry(catalog, [])

    def schema_lookup(tool_name: str):
        try:
            return registry.get(tool_name).input_schema
        except Exception:
            return None

    store = RecordStore(config.store_dir, schema_lookup=schema_lookup)
    bad_limit_keys = set(config.limits_doc) - {"max_visits", "max_retries", "turn_budget_s", "fallback_text"}
    if bad_limit_keys:
        raise ConfigError(f"unknown limit keys: {sorted(bad_limit_keys)}")
    limits = Limits.for_graph(graph, **config.limits_doc)
    return Runtime(
        config=config,
        graph=graph,
        catalog=catalog,
        backend=build_backend(config.backend_doc),
        judge_backend=build_judge(config.judge_doc),
        format_profiles=parse_profiles(config.format_profiles_doc),
        limits=limits,
        store=store,
    )
