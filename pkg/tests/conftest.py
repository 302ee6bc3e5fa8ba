import pytest

from beamdecay.model import BoundaryControls, reference_beam

# acceptance verdicts, filled by test_acceptance and echoed after the run
VERDICTS = {}


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[key])


@pytest.fixture
def ref_beam():
    return reference_beam(1.0)


@pytest.fixture
def damped_bc():
    return BoundaryControls(ka_left=0.01, ka_right=0.01)
