import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []
_START = time.perf_counter()


def pytest_configure(config):
    config.addinivalue_line("markers", "property: invariant checks (hypothesis or exhaustive)")
    config.addinivalue_line("markers", "acceptance: numbered acceptance criteria")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
    terminalreporter.write_line(f"session wall time {time.perf_counter() - _START:.1f} s")


@pytest.fixture
def record_criterion():
    def rec(n: int, ok: bool, detail: str, seconds: float):
        ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}  [{seconds:.2f} s]")
    return rec
