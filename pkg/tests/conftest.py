import numpy as np
import pytest

from marchenko import exponential, s_matrix_curve, square_well, truncated

EXP_V0, EXP_A = -3.0, 1.5
H, N = 0.04, 100
Q_GRID = 0.05 * np.arange(1, 161)

# acceptance module fills this; printed at the end of the session
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def exp_potential():
    return exponential(EXP_V0, EXP_A)


@pytest.fixture(scope="session")
def exp_data(exp_potential):
    return s_matrix_curve(exp_potential, 0, Q_GRID)


@pytest.fixture(scope="session")
def finite_range_data(exp_potential):
    """Reference exponential cut at R = N h, per partial wave."""
    V = truncated(exp_potential, N * H)
    return {l: s_matrix_curve(V, l, Q_GRID) for l in (0, 1, 2)}


@pytest.fixture(scope="session")
def well_data():
    return s_matrix_curve(square_well(-4.0, 2.0), 0, Q_GRID)
