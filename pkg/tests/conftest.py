import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from psdecay.spectral import Field, GridSpec, hermitian_partner, inverse

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")


def random_real_field(grid: GridSpec, rng, zero_row: bool = False) -> Field:
    """Real physical field with random spectrum, free of Nyquist modes.

    With ``zero_row`` the xi = 0 row is cleared as well.
    """
    F = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    F[0, :] = 0.0  # xi Nyquist row
    F[:, 0] = 0.0  # eta Nyquist column
    if zero_row:
        F[grid.index_of_xi_zero(), :] = 0.0
    F = 0.5 * (F + np.conj(hermitian_partner(F)))
    return Field.physical(grid, inverse(grid, F).real, real=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_grid():
    return GridSpec(10.0, 32, 8)


# -- acceptance summary ---------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
