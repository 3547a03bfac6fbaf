import numpy as np
import pytest

from ckfields.lie_core import MatrixLieAlgebra

# standard infinitesimal rotations about the x, y and z axes
L1 = np.array([[0.0, 0, 0], [0, 0, -1], [0, 1, 0]])
L2 = np.array([[0.0, 0, 1], [0, 0, 0], [-1, 0, 0]])
L3 = np.array([[0.0, -1, 0], [1, 0, 0], [0, 0, 0]])


def taylor_exp(A, terms=60):
    out = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


@pytest.fixture(scope="session")
def so3():
    return MatrixLieAlgebra("so(3)", np.array([L1, L2, L3]))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
