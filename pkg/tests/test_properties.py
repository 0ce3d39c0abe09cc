"""Property-based tests of the invariants (hypothesis)."""

import math

from hypothesis import assume, given
from hypothesis import strategies as st

from monocert.bounds import gamma_bounds, gamma_ratio_bounds
from monocert.cmverify import GridSpec, certified_sign, verify_series_claims
from monocert.functions import F_a, f_a, f_a_derivative, phi_kernel, phi_threshold
from monocert.report import _fmt
from monocert.special import HALF_LOG_TWO_PI, digamma, polygamma, stirling_remainder

xs = st.floats(min_value=1e-2, max_value=1e3)
shifts = st.floats(min_value=0.0, max_value=10.0)
ts = st.floats(min_value=1e-3, max_value=200.0)


@given(xs)
def test_theta_positive_and_decreasing(x):
    assert stirling_remainder(x) > 0
    assert stirling_remainder(x, 1) < 0


@given(xs, st.integers(min_value=1, max_value=8))
def test_polygamma_sign(x, k):
    assert (-1) ** (k + 1) * polygamma(k, x) > 0


@given(xs)
def test_digamma_recurrence(x):
    assert abs(math.fsum([digamma(x + 1), -digamma(x), -1 / x])) <= 1e-12 * max(1.0, 1 / x)


@given(xs, shifts, shifts)
def test_f_a_decreasing_in_shift(x, a, b):
    assume(abs(a - b) > 1e-6)
    lo, hi = min(a, b), max(a, b)
    assert f_a(lo, x) > f_a(hi, x)


@given(xs, shifts)
def test_F_identity(x, a):
    assert abs(f_a(a, x) - (HALF_LOG_TWO_PI - x - F_a(a, x))) <= 1e-13 * max(1.0, x)


@given(xs)
def test_sign_inequalities(x):
    assert f_a(0.0, x) > 0 > f_a(0.5, x)


@given(st.floats(min_value=0.05, max_value=100), st.integers(min_value=0, max_value=6))
def test_cm_signs(x, n):
    if n == 0:
        assert f_a(0.0, x) > 0
        assert f_a(1.0, x) < 0
    else:
        assert (-1) ** n * f_a_derivative(0.0, x, n) > 0
        assert (-1) ** n * f_a_derivative(1.0, x, n) < 0


@given(ts)
def test_threshold_range(t):
    v = phi_threshold(t)
    assert 0 < v < 0.5


@given(st.floats(min_value=0.0, max_value=1.0), ts)
def test_kernel_threshold_duality(a, t):
    gap = a - phi_threshold(t)
    assume(abs(gap) > 1e-10)
    assert math.copysign(1, phi_kernel(a, t)) == math.copysign(1, gap)


@given(st.floats(min_value=1e-2, max_value=1e3))
def test_gamma_enclosure(x):
    assert gamma_bounds(x).contains


@given(
    st.floats(min_value=-1.0, max_value=3.0),
    st.floats(min_value=0.05, max_value=5.0),
    st.floats(min_value=0.02, max_value=200.0),
)
def test_ratio_enclosure(s, width, offset):
    t = s + width
    x = offset - s
    bp = gamma_ratio_bounds(x, s, t)
    assert bp.contains
    # margins equal the difference of f_a at the two shifted points
    assert abs(bp.upper_margin - (f_a(0.0, x + s) - f_a(0.0, x + t))) <= 1e-10


@given(st.integers(min_value=8, max_value=10**5))
def test_series_claims_pointwise(i):
    assert 3 * 2 ** (i - 2) - i * i + i > 0
    assert (i - 3) * (i * i - 4) > 0
    assert 2 ** (i - 1) * (i * i - 13 * i + 24) + i**4 - 6 * i**3 + 19 * i**2 - 14 * i - 24 > 0


def test_series_claims_extended_range():
    assert all(c.holds for c in verify_series_claims(2000))


@given(st.floats(min_value=1e-300, max_value=1e300), st.floats(min_value=1.0, max_value=1e6), st.integers(2, 50))
def test_grid_parse_round_trip(lo, span, count):
    hi = lo * span
    assume(hi > lo and math.isfinite(hi))
    g = GridSpec.log(lo, hi, count)
    assert GridSpec.parse(f"{lo!r}:{hi!r}:{count}:log") == g
    assert all(b > a for a, b in zip(g.points, g.points[1:]))


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_csv_number_format_round_trips(v):
    assert float(_fmt(v)) == v


@given(st.floats(allow_nan=False), st.floats(min_value=0.0, max_value=1e300))
def test_certified_sign_antisymmetric(m, scale):
    assert certified_sign(-m, scale) == -certified_sign(m, scale)
