import pytest

from selfaffine import _accel

BACKENDS = ["numpy"] + (["numba"] if _accel.numba_available() else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Run the test once per kernel backend, restoring the previous one after."""
    previous = _accel.get_backend()
    _accel.set_backend(request.param)
    yield request.param
    _accel.set_backend(previous)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion."""

    def emit(number, ok, detail, seconds):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail} ({seconds:.2f} s)"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
