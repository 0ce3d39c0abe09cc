"""Shared oracles and settings for the test-suite.

mpmath (50 digits) is the independent oracle for special-function values;
Richardson-extrapolated central differences are the oracle for derivatives.
Neither is used by the library itself.
"""


import mpmath
import pytest
from hypothesis import HealthCheck, settings

mpmath.mp.dps = 50

settings.register_profile(
    "monocert",
    derandomize=True,
    deadline=None,
    max_examples=200,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("monocert")


def richardson_derivative(f, x, h=None, levels=6):
    """First derivative of ``f`` at ``x`` by Richardson-extrapolated central differences.

    Central differences D(h) = (f(x+h) - f(x-h)) / 2h have an error series in
    even powers of h; halving h and eliminating h^2, h^4, ... in a Neville
    table gives a high-order estimate.
    """
    h = h if h is not None else 0.25 * min(1.0, x)
    table = []
    for i in range(levels):
        row = [(f(x + h) - f(x - h)) / (2.0 * h)]
        for j in range(1, i + 1):
            fac = 4.0**j
            row.append((fac * row[j - 1] - table[i - 1][j - 1]) / (fac - 1.0))
        table.append(row)
        h *= 0.5
    return table[-1][-1]


def mixed_close(value, reference, tol):
    """|value - reference| <= tol * max(1, |reference|)."""
    return abs(value - reference) <= tol * max(1.0, abs(reference))


def rel_err(value, reference):
    reference = float(reference)
    return abs(value - reference) / abs(reference) if reference else abs(value)


def mp_f_a(a, x):
    """f_a(x) in 50-digit arithmetic."""
    a, x = mpmath.mpf(a), mpmath.mpf(x)
    return (
        mpmath.log(2 * mpmath.pi) / 2
        - x
        + (x - mpmath.mpf(1) / 2) * mpmath.log(x)
        - mpmath.loggamma(x)
        + mpmath.psi(1, x + a) / 12
    )


@pytest.fixture
def report_line(capsys):
    """Print one line to the real terminal, bypassing output capture."""

    def emit(text):
        with capsys.disabled():
            print(text)

    return emit
