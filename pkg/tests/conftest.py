from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flowagent.backends import ScriptedBackend
from flowagent.graph import load_graph
from flowagent.tools import build_registry, load_catalog

FIXTURES = resources.files("flowagent") / "fixtures"
GOLDEN = Path(__file__).parent / "fixtures" / "golden"


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(fixture_path("catalog.json"))


@pytest.fixture(scope="session")
def gift_graph():
    return load_graph(fixture_path("graph_gift_shop.json"))


@pytest.fixture(scope="session")
def demo_backend():
    return ScriptedBackend.from_file(fixture_path("scripted_backend_gift.json"))


@pytest.fixture
def registry(catalog):
    return build_registry(catalog, [])


@pytest.fixture(scope="session")
def demo_session():
    import json

    return json.loads((FIXTURES / "demo_session.json").read_text(encoding="utf-8"))
