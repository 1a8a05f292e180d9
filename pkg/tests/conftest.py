import os

import numpy as np
import pytest
from hypothesis import settings

# fixed example sequence by default; HYPOTHESIS_PROFILE=explore searches afresh
settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.register_profile("explore", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_criteria: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    def record(name: str, passed: bool, detail: str) -> bool:
        line = f"{name}: {'PASS' if passed else 'FAIL'} ({detail})"
        _criteria.append((name, passed, detail))
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _criteria:
        terminalreporter.write_line(f"{name}: {'PASS' if passed else 'FAIL'} ({detail})")
