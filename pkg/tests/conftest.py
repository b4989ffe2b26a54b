import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def record_criterion(index: int, description: str, passed, detail: str = ""):
    """Register an acceptance-criterion outcome and assert it."""
    _ACCEPTANCE.append((index, description, bool(passed), detail))
    assert passed, f"criterion {index} ({description}) failed: {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for index, description, ok, detail in sorted(_ACCEPTANCE):
        status = "PASS" if ok else "FAIL"
        suffix = f"  [{detail}]" if detail else ""
        terminalreporter.write_line(f"criterion {index}: {status}  {description}{suffix}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
