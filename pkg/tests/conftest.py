import numpy as np
import pytest

from rpcscreen import _backend
from rpcscreen.screening import standardize

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=_backend.available_backends())
def backend(request):
    """Run the test once per available kernel backend."""
    previous = _backend.backend_name()
    _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def make_data(n, p, seed=0):
    r = np.random.default_rng(seed)
    return standardize(r.standard_normal((n, p)), r.standard_normal(n))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
