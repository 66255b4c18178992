from __future__ import annotations

import os

import pytest
from hypothesis import settings

from qnilp.gamma import NilpotencyEngine

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

# a user-level cache must never leak into the tests
os.environ.pop("QNILP_CACHE_DIR", None)

CRITERIA: dict[int, str] = {}


@pytest.fixture(scope="session")
def engine() -> NilpotencyEngine:
    """In-memory engine shared by the whole session; never touches disk."""
    return NilpotencyEngine(cache_dir=None)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[k])
