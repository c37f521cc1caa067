import json
from collections import OrderedDict
from pathlib import Path

import pytest

ORACLE_PATH = Path(__file__).parent / "oracles" / "values.json"

# criterion number -> list of (check name, passed, detail)
ACCEPTANCE = OrderedDict()


@pytest.fixture(scope="session")
def oracle():
    return json.loads(ORACLE_PATH.read_text(encoding="utf-8"))


def record(criterion: int, check: str, passed: bool, detail: str = ""):
    ACCEPTANCE.setdefault(criterion, []).append((check, bool(passed), detail))


def acceptance_lines():
    lines = []
    for number in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[number]
        ok = all(p for _, p, _ in checks)
        failed = [f"{name}: {detail}" for name, p, detail in checks if not p]
        summary = "; ".join(failed) if failed else "; ".join(f"{n}: {d}" for n, _, d in checks if d)
        lines.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {summary}")
    return lines


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_lines():
        terminalreporter.write_line(line)
