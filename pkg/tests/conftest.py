import pytest

from toylocal.bell import bell_measurement
from toylocal.enumeration import enumerate_valid_measurements
from toylocal.formats import bundled_measurement
from toylocal.rng import Stream


@pytest.fixture
def A():
    return bundled_measurement("A")


@pytest.fixture
def B():
    return bundled_measurement("B")


@pytest.fixture
def bell():
    return bell_measurement()


@pytest.fixture
def P():
    return bundled_measurement("P")


@pytest.fixture
def P_prime():
    return bundled_measurement("P_prime")


@pytest.fixture
def rng():
    return Stream(20240601)


@pytest.fixture(scope="session")
def small_measurements():
    """Every valid measurement the suite knows at N <= 2."""
    ms = list(enumerate_valid_measurements(1))
    ms += enumerate_valid_measurements(2, generator_subclass=True)
    ms += [bundled_measurement(n) for n in ("A", "B", "P", "P_prime", "bell")]
    return ms


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
