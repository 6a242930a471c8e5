import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hypergi.lang import parse  # noqa: E402

ACCEPTANCE_LINES = []

POLICY = "#policy high h : 1..8\n#policy low a : 1..8\n#policy low b : 1..8\n"


@pytest.fixture
def prog():
    """Parse a body under the default h/a/b policy."""

    def make(body, policy=POLICY, name="t"):
        return parse(policy + body, name=name)

    return make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
