from __future__ import annotations

import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(Path(__file__).parent))

REFERENCE_MODELS = {
    "hello_world": "hello_world.dflow",
    "demo_triggers": "demo_triggers.dflow",
    "demo_eservices": "demo_eservices.dflow",
    "demo_dialogues": "demo_dialogues.dflow",
    "demo": "demo.dflow",
    "weather": "weather.dflow",
}


def read_fixture(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture
def hello_src() -> str:
    return read_fixture("hello_world.dflow")


@pytest.fixture
def demo_src() -> str:
    return read_fixture("demo.dflow")


@pytest.fixture
def weather_src() -> str:
    return read_fixture("weather.dflow")


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance lines at the end of the run, where they are easy to find."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
