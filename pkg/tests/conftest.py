from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spiderquery import build_graph, parse_schema

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def example_text() -> str:
    return (DATA / "example.ssd").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def example_schema(example_text):
    return parse_schema(example_text)


@pytest.fixture(scope="session")
def example_graph(example_schema):
    return build_graph(example_schema)
