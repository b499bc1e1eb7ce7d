from __future__ import annotations

from pathlib import Path

import pytest

from cidkit.model import CidModel
from cidkit.parser import parse_file

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
DATA = Path(__file__).resolve().parent / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"

PART_HANDLER = FIXTURES / "partHandler.cid"
DOC_MANAGER = FIXTURES / "docManager.cid"
DRAWING = DATA / "drawing.cid"

# criterion number -> (title, passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture(scope="session")
def part_handler() -> CidModel:
    return parse_file(PART_HANDLER)


@pytest.fixture(scope="session")
def doc_manager() -> CidModel:
    return parse_file(DOC_MANAGER)


@pytest.fixture(scope="session")
def both_fixtures(part_handler, doc_manager) -> CidModel:
    return CidModel(part_handler.components + doc_manager.components)


@pytest.fixture(scope="session")
def drawing() -> CidModel:
    return parse_file(DRAWING)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        title, ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
