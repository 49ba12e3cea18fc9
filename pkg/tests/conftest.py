import sys

import pytest

from hwfeedback.feedback import load_lexicon

from helpers import FIXTURES


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon((FIXTURES / "lexicon.txt").read_text(encoding="utf-8"))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
