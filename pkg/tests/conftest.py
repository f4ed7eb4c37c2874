import pytest

from clifford_doubling import build_mesh, derive_params

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def mesh6():
    return build_mesh(derive_params(6))


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
