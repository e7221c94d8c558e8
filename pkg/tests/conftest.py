import numpy as np
import pytest

from rae.circuits import DEFAULT_THETA, build_ansatz
from rae.sim import PauliString, expectation

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ansatz_pi():
    """Noiseless <X0X1> of the default ansatz."""
    return expectation(build_ansatz(DEFAULT_THETA).run(), PauliString("XX"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_density_matrix(n, rng, rank=None):
    dim = 2**n
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
