import pytest

from squeezelock import RunConfig

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def default_config():
    return RunConfig()


@pytest.fixture
def opo(default_config):
    return default_config.opo_params
