import warnings

import pytest


class ZeroNoise:
    """Noise source returning zero perturbations and zero normals."""

    def exponential(self):
        return 0.0

    def normal(self):
        return 0.0


@pytest.fixture
def zero_noise():
    return ZeroNoise()


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
