
import pytest

from zetalab import divisor as dv
from zetalab import zeta
from zetalab.error_terms import build_error_terms

#: criterion number -> (status, detail); filled by the acceptance tests
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def table():
    """Divisor table large enough for every check that needs one."""
    return dv.build_divisor_table(4_100_000)


@pytest.fixture(scope="session")
def zgrid_mid():
    return zeta.build_zeta_grid(21_000.0)


@pytest.fixture(scope="session")
def egrid_mid(zgrid_mid, table):
    return build_error_terms(zgrid_mid, table)


@pytest.fixture(scope="session")
def egrid_1e4(table):
    return build_error_terms(zeta.build_zeta_grid(1e4), table)


@pytest.fixture(scope="session")
def egrid_1e4_fine(table):
    return build_error_terms(zeta.build_zeta_grid(1e4, c_step=0.25), table)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {detail}")


def floor_sum(n):
    """Sum of floor(n/k) for k <= n, by plain enumeration."""
    return sum(n // k for k in range(1, n + 1))


def log_spaced(lo, hi, n):
    return [lo * (hi / lo) ** (i / (n - 1)) for i in range(n)]
