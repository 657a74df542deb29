from __future__ import annotations

import json
from pathlib import Path

import pytest

from quatcurv.geometry import BUILTIN_CHARTS
from quatcurv.harness.corpus import generate_corpus
from quatcurv.harness.suite import full_verification

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def oracle() -> dict:
    return json.loads((FIXTURES / "oracle.json").read_text())


@pytest.fixture(scope="session")
def corpora() -> dict:
    return {name: generate_corpus(42, 50, name) for name in BUILTIN_CHARTS}


@pytest.fixture(scope="session")
def verification():
    """The default symbolic verification run over all built-in charts."""
    return full_verification(BUILTIN_CHARTS, seed=42, count=50)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
