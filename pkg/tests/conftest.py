import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from orkit import repro  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    """``record(number, ok, detail)`` stores one acceptance line for the summary."""

    def _record(number: int, ok: bool, detail: str):
        prev = _ACCEPTANCE.get(number)
        # a criterion split over several tests fails if any part fails
        if prev is not None:
            ok = ok and prev[0]
            detail = f"{prev[1]}; {detail}"
        _ACCEPTANCE[number] = (ok, detail)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}")


@pytest.fixture(scope="session")
def examples():
    """Bundled example files by name, loaded once."""
    return {name: repro.load_example(name) for name in repro.example_names()}
