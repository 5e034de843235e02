import numpy as np
import pytest
from hypothesis import settings

from sairod.model import Parameters

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture
def paper():
    return Parameters.paper(N=20, C=5)


def random_parameters(rng: np.random.Generator, N: int, C: int) -> Parameters:
    """Draw a valid parameter vector; each residual is a Dirichlet share."""
    b, d, _ = rng.dirichlet(np.ones(3))
    mu, psi, al, _ = rng.dirichlet(np.ones(4))
    sg, xi, _ = rng.dirichlet(np.ones(3))
    io, up, _ = rng.dirichlet(np.ones(3))
    return Parameters(N=N, C=C, omega=rng.uniform(), beta=b, delta=d, mu=mu, alpha=al,
                      sigma=sg, xi=xi, gamma=rng.uniform(), psi=psi, iota=io, upsilon=up)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
