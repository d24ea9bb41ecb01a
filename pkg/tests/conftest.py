import pytest

from modpoisson.primes import sieve

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def table_1e4():
    return sieve(10**4)


@pytest.fixture(scope="session")
def table_1e6():
    return sieve(10**6)


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(label: str, passed: bool, detail: str) -> None:
        line = f"{label:<5} {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
