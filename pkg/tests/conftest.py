import json
from pathlib import Path

import pytest

ORACLES = Path(__file__).parent / "oracles" / "values.json"


@pytest.fixture(scope="session")
def oracles():
    return json.loads(ORACLES.read_text())


def cplx(pair):
    return complex(pair[0], pair[1])


def rel(a, b):
    return abs(a - b) / abs(b)


# one line per acceptance criterion, printed after the run
CRITERIA: dict[int, tuple[bool, str]] = {}
N_CRITERIA = 9


@pytest.fixture
def criterion():
    def record(n: int, ok: bool, detail: str) -> None:
        CRITERIA[n] = (bool(ok), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in range(1, N_CRITERIA + 1):
        ok, detail = CRITERIA.get(n, (False, "no result (test errored or was not run)"))
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
