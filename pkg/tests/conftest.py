import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from orlicz_frac import make_young  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def power2():
    return make_young({"family": "power", "p": 2})


@pytest.fixture(scope="session")
def power3():
    return make_young({"family": "power", "p": 3})


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
