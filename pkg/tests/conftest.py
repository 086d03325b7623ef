import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from curvlab import modelspaces

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


# results accumulated by tests/test_acceptance.py; printed as a summary
# section so every criterion gets exactly one visible pass/fail line
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def flat2():
    return modelspaces.build_builtin("flat", n=2)


@pytest.fixture(scope="session")
def cp2():
    return modelspaces.build_builtin("cpn", n=2, c=4.0)


@pytest.fixture(scope="session")
def cd2():
    return modelspaces.build_builtin("cdn", n=2, c=-4.0)


@pytest.fixture(scope="session")
def s6():
    return modelspaces.build_builtin("s6")


@pytest.fixture(scope="session")
def perturbed_flat():
    return modelspaces.build_builtin("perturbed-flat")


@pytest.fixture(scope="session")
def kahler_bump():
    return modelspaces.build_builtin("kahler-bump")


@pytest.fixture
def rng():
    return np.random.default_rng(20260813)
