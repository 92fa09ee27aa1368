import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE = {}
N_CRITERIA = 10


@pytest.fixture
def record():
    """``record(k, ok, detail)`` stores one acceptance line for the summary."""

    def _record(k: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE[k] = (bool(ok), detail)
        print(f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, N_CRITERIA + 1):
        if k in ACCEPTANCE:
            ok, detail = ACCEPTANCE[k]
            terminalreporter.write_line(f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} {detail}")
        else:
            terminalreporter.write_line(f"ACCEPTANCE {k}: NOT RUN")
