import numpy as np
import pytest

from lindblift import MasterEquation


def random_matrix(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def random_unit_disc_matrix(rng, n):
    r = np.sqrt(rng.uniform(size=(n, n)))
    phi = rng.uniform(0, 2 * np.pi, size=(n, n))
    return r * np.exp(1j * phi)


def random_hermitian(rng, n):
    a = random_matrix(rng, n)
    return 0.5 * (a + a.conj().T)


def random_density(rng, n):
    a = random_matrix(rng, n)
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_model(rng, n, n_channels):
    h = random_hermitian(rng, n)
    channels = [(random_matrix(rng, n) / np.sqrt(n), rng.uniform(0.1, 1.0)) for _ in range(n_channels)]
    return MasterEquation.lindblad(h, channels)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
