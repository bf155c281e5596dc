from __future__ import annotations

import functools
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from gsos_wb.corpus import load_builtin  # noqa: E402
from gsos_wb.semantics import GsosLanguage  # noqa: E402
from gsos_wb.while_lang import WhileLanguage  # noqa: E402

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def builtin_language(name: str) -> GsosLanguage:
    return GsosLanguage(load_builtin(name))


@functools.lru_cache(maxsize=None)
def while_language() -> WhileLanguage:
    return WhileLanguage()


@pytest.fixture
def lang():
    return builtin_language


@pytest.fixture
def spc():
    return builtin_language("spc")


@pytest.fixture
def ccs():
    return builtin_language("ccs-core")


@pytest.fixture
def wl():
    return while_language()


# verdict lines collected by the acceptance suite, echoed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
