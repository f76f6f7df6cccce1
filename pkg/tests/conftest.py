import contextlib
import time

import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@contextlib.contextmanager
def _record(label: str, budget_s: float | None = None):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget_s is not None:
            assert elapsed < budget_s, f"took {elapsed:.2f}s, budget {budget_s}s"
    except BaseException as err:
        elapsed = time.perf_counter() - start
        ACCEPTANCE_LINES.append(f"FAIL  {label}  ({elapsed:.2f}s) {type(err).__name__}: {err}".splitlines()[0])
        raise
    ACCEPTANCE_LINES.append(f"PASS  {label}  ({elapsed:.2f}s)")


@pytest.fixture
def criterion():
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
