import sys

import pytest

from lbmbsn.magnet import derive, preset


@pytest.fixture(scope="session")
def m1():
    return preset("M1")


@pytest.fixture(scope="session")
def m2():
    return preset("M2")


@pytest.fixture(scope="session")
def d1(m1):
    return derive(m1)


@pytest.fixture(scope="session")
def d2(m2):
    return derive(m2)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
