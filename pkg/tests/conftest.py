import pytest
from hypothesis import HealthCheck, settings

from bdiv_irr import load_fixture

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def scen_a():
    return load_fixture("scen_a")


@pytest.fixture(scope="session")
def scen_b():
    return load_fixture("scen_b")


@pytest.fixture(scope="session")
def scen_c():
    return load_fixture("scen_c")


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
