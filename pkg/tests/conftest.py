import pytest

from wmscan import kernel

ACCEPTANCE_LINES = []


@pytest.fixture(params=sorted(kernel.KERNELS))
def kernel_name(request):
    return request.param


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for the acceptance summary."""
    def record(name, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
