import pytest

from cubeshape.quad_geodesics import BinaryQuadraticForm


@pytest.fixture
def q181():
    return BinaryQuadraticForm(1, 8, 1)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
