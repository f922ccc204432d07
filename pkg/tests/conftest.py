import pytest

from elasticast import _backend

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=_backend.available())
def backend(request):
    previous = _backend.name()
    _backend.use(request.param)
    yield request.param
    _backend.use(previous)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
