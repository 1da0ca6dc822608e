import re
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"

_CRITERION = re.compile(r"test_criterion_(\d+)")


@pytest.fixture(scope="session")
def fixture_1k():
    with open(DATA / "fixture_1k.txt", encoding="utf-8") as f:
        return [line.split() for line in f]


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion; a criterion passes only if all its tests pass."""
    status: dict[int, bool] = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            m = _CRITERION.search(nodeid)
            if not m:
                continue
            if key == "passed" and rep.when != "call":
                continue
            n = int(m.group(1))
            status[n] = status.get(n, True) and key == "passed"
    if not status:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(status):
        terminalreporter.write_line(f"ACCEPTANCE criterion {n}: {'PASS' if status[n] else 'FAIL'}")
