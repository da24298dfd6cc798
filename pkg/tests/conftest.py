import sys
from pathlib import Path

import pytest

from occusim.bn import Cpt, NetworkSpec, VariableSpec
from occusim.occupant import build_default_door_dbn

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


@pytest.fixture
def scenarios_dir():
    return SCENARIOS


@pytest.fixture
def ab_net():
    """A -> B with P(a1) = 0.3, P(b1 | a1) = 0.9, P(b1 | a0) = 0.2."""
    A = VariableSpec("A", ("a0", "a1"))
    B = VariableSpec("B", ("b0", "b1"))
    return NetworkSpec(
        (A, B),
        (
            Cpt("A", (), {(): (0.7, 0.3)}),
            Cpt("B", ("A",), {("a0",): (0.8, 0.2), ("a1",): (0.1, 0.9)}),
        ),
    )


@pytest.fixture(scope="session")
def door_dbn():
    return build_default_door_dbn()


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(number, title, ok, detail=""):
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
