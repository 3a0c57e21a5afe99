import pytest

from nde5.analysis import extend_profile
from nde5.bvp import polish_shock
from nde5.compactons import oscillatory_compacton
from nde5.shooting import shoot_shock


@pytest.fixture(scope="session")
def n50_shot():
    return shoot_shock("N50", (-1.0, 1.0), tol=1e-12)


@pytest.fixture(scope="session")
def n50_polished(n50_shot):
    return polish_shock(n50_shot)


@pytest.fixture(scope="session")
def n50_extended(n50_polished):
    return extend_profile(n50_polished.profile)


@pytest.fixture(scope="session")
def compacton_branch1():
    return oscillatory_compacton(branch=1)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
