import mpmath
import pytest

from cfcrit import ThetaSpec, expand_theta, golden_spec, table_for


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def golden_table():
    return table_for(golden_spec(), 60)


def theta_highprec(spec: ThetaSpec, dps: int = 200, depth: int = 300):
    """High-precision value of theta from a deep convergent, as mpmath mpf.

    Independent of the package's rational path: evaluates the continued
    fraction bottom-up in mpmath fixed precision.
    """
    try:
        a = expand_theta(spec, depth)
    except Exception:
        # explicit specs may be shorter; use everything available
        a = list(spec.quotients)
    with mpmath.workdps(dps):
        x = mpmath.mpf(int(a[-1]))
        for ak in reversed(a[:-1]):
            x = int(ak) + 1 / x
        return +x
