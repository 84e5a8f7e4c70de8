import numpy as np
import pytest

from catrecip.fields import DEFAULT_PRIMES, GF, QQ


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[QQ, GF(DEFAULT_PRIMES[0]), GF(101)], ids=["QQ", "GFbig", "GF101"])
def field(request):
    return request.param


@pytest.fixture(scope="session")
def cat23():
    from catrecip.spaces import build_cat_space
    return build_cat_space(2, 2)


@pytest.fixture(scope="session")
def cat22():
    from catrecip.spaces import build_cat_space
    return build_cat_space(2, 1)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
