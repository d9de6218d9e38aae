import pytest

from conequantile import kernels

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    kernels.warmup()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def both_backends():
    """Iterate a block under each available backend."""
    names = ["numpy"] + (["numba"] if kernels.HAS_NUMBA else [])
    return names


@pytest.fixture(autouse=True)
def _restore_backend():
    prev = kernels.get_backend()
    yield
    kernels.set_backend(prev)

