"""Double-precision log-gamma, digamma and polygamma on (0, inf).

Every routine here is built from two pieces: the Stirling-type asymptotic
expansion (with Bernoulli numbers through B30), valid once the argument has
been pushed past a shift point, and the functional recurrences that carry
the result back down to the requested argument.  Near the two zeros of
ln Gamma (x = 1, 2) a Maclaurin expansion in zeta(k) - 1 is used instead so
that the relative error stays small.

No reflection formula: the domain is x > 0 only.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import fsum

from .errors import DomainError, UnsupportedOrderError

__all__ = [
    "EULER_GAMMA",
    "HALF_LOG_TWO_PI",
    "MAX_POLYGAMMA_ORDER",
    "SHIFT_POINT",
    "BERNOULLI",
    "positive_real",
    "deriv_order",
    "ln_gamma",
    "digamma",
    "trigamma",
    "polygamma",
    "stirling_remainder",
]

MAX_POLYGAMMA_ORDER = 8

# Euler-Mascheroni constant and ln(2 pi)/2, 20 significant digits.
EULER_GAMMA = 0.57721566490153286061
HALF_LOG_TWO_PI = 0.91893853320467274178

# Arguments are shifted up to at least this value before the asymptotic
# series is used.  Higher polygamma orders need a larger shift point to keep
# the truncated series below one ulp (see _shift_point).
SHIFT_POINT = 10.0

# B_2, B_4, ..., B_30 (exact).
BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
    Fraction(854513, 138),
    Fraction(-236364091, 2730),
    Fraction(8553103, 6),
    Fraction(-23749461029, 870),
    Fraction(8615841276005, 14322),
)

# zeta(k) - 1 for k = 2..33, 20 significant digits.
_ZETA_MINUS_ONE = (
    0.64493406684822643647,
    0.20205690315959428540,
    0.082323233711138191516,
    0.036927755143369926331,
    0.017343061984449139715,
    0.0083492773819228268398,
    0.0040773561979443393787,
    0.0020083928260822144179,
    0.00099457512781808533715,
    0.00049418860411946455870,
    0.00024608655330804829864,
    0.00012271334757848914675,
    6.1248135058704829259e-05,
    3.0588236307020493552e-05,
    1.5282259408651871733e-05,
    7.6371976378997622736e-06,
    3.8172932649998398565e-06,
    1.9082127165539389257e-06,
    9.5396203387279611315e-07,
    4.7693298678780646312e-07,
    2.3845050272773299000e-07,
    1.1921992596531107307e-07,
    5.9608189051259479612e-08,
    2.9803503514652280186e-08,
    1.4901554828365041235e-08,
    7.4507117898354294920e-09,
    3.7253340247884570548e-09,
    1.8626597235130490064e-09,
    9.3132743241966818287e-10,
    4.6566290650337840730e-10,
    2.3283118336765054920e-10,
    1.1641550172700519776e-10,
)

# Coefficients of the common asymptotic tail
#     T_m(x) = sum_j B_2j (2j+m-1)! / (2j)! * x^-(2j+m),   m = -1 .. 8.
# m = -1 is the Binet remainder, m = 0 the digamma tail and m = k >= 1 the
# tail of (-1)^(k+1) psi^(k).
_TAIL_COEFFS = {
    m: tuple(
        float(b * Fraction(math.factorial(2 * j + m - 1), math.factorial(2 * j)))
        for j, b in enumerate(BERNOULLI, start=1)
    )
    for m in range(-1, MAX_POLYGAMMA_ORDER + 1)
}


def positive_real(x) -> float:
    """Coerce ``x`` to a finite, strictly positive float or raise DomainError."""
    try:
        v = float(x)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"expected a real number, got {x!r}") from exc
    if not math.isfinite(v) or v <= 0.0:
        raise DomainError(f"argument must be finite and > 0, got {x!r}")
    return v


def deriv_order(k, lo: int = 0, hi: int = MAX_POLYGAMMA_ORDER) -> int:
    """Validate an integer derivative order in ``[lo, hi]``."""
    if isinstance(k, bool) or int(k) != k:
        raise UnsupportedOrderError(f"order must be an integer, got {k!r}")
    k = int(k)
    if k < lo or k > hi:
        raise UnsupportedOrderError(f"order {k} outside supported range [{lo}, {hi}]")
    return k


def _shift_point(m: int) -> float:
    # Smallest argument at which 15 Bernoulli terms of T_m reach ~1e-17
    # relative accuracy; checked against mpmath in the test-suite.
    return SHIFT_POINT if m <= 2 else SHIFT_POINT + 2.0 * (m - 2)


def _inv_pow(y: float, n: int) -> float:
    try:
        return (1.0 / y) ** n
    except (OverflowError, ZeroDivisionError):
        return math.inf


def _asymptotic_tail(m: int, x: float) -> list:
    """Terms of T_m(x), stopping at ulp level or at the smallest term."""
    inv2 = 1.0 / (x * x)
    p = x ** -(m + 2)
    terms = []
    prev = math.inf
    for c in _TAIL_COEFFS[m]:
        term = c * p
        a = abs(term)
        if a >= prev:
            break
        terms.append(term)
        if a <= 1e-18 * abs(terms[0]):
            break
        prev = a
        p *= inv2
    return terms


def _lngamma_series(z: float) -> float:
    # ln Gamma(2 + z) = (1 - gamma) z + sum_k (-1)^k (zeta(k) - 1) z^k / k, |z| <= 1/2
    terms = [(1.0 - EULER_GAMMA) * z]
    zk = -z
    for k, c in enumerate(_ZETA_MINUS_ONE, start=2):
        zk *= -z
        t = c * zk / k
        terms.append(t)
        if abs(t) < 1e-18 * abs(terms[0]):
            break
    return fsum(terms)


def ln_gamma(x) -> float:
    """Natural logarithm of the gamma function for x > 0.

    >>> ln_gamma(1.0), ln_gamma(2.0)
    (0.0, 0.0)
    >>> round(ln_gamma(0.5), 10)
    0.5723649429
    """
    x = positive_real(x)
    if x >= SHIFT_POINT:
        terms = [(x - 0.5) * math.log(x), -x, HALF_LOG_TWO_PI]
        terms.extend(_asymptotic_tail(-1, x))
        return fsum(terms)
    if x > 2.5:
        n = int(math.ceil(x - 2.5))
        prod = 1.0
        for j in range(1, n + 1):
            prod *= x - j
        return fsum([_lngamma_series(x - n - 2.0), math.log(prod)])
    if x >= 1.5:
        return _lngamma_series(x - 2.0)
    if x >= 0.5:
        z = x - 1.0
        return fsum([_lngamma_series(z), -math.log1p(z)])
    return fsum([_lngamma_series(x), -math.log1p(x), -math.log(x)])


def digamma(x) -> float:
    """psi(x) = d/dx ln Gamma(x) for x > 0."""
    x = positive_real(x)
    n = max(0, int(math.ceil(SHIFT_POINT - x)))
    y = x + n
    terms = [math.log(y), -0.5 / y]
    terms.extend(-t for t in _asymptotic_tail(0, y))
    terms.extend(-1.0 / (x + j) for j in range(n))
    return fsum(terms)


def _exact_split(v: Fraction) -> tuple:
    """(hi, lo) with hi = float(v) and lo = float(v - hi); inf on overflow."""
    try:
        hi = float(v)
    except OverflowError:
        return math.inf, 0.0
    return hi, float(v - Fraction(hi))


def _polygamma_abs(k: int, x: float) -> float:
    # (-1)^(k+1) psi^(k)(x) > 0; every term below is positive.
    n = max(0, int(math.ceil(_shift_point(k) - x)))
    y = x + n
    fk = math.factorial(k)
    terms = [math.factorial(k - 1) * _inv_pow(y, k), 0.5 * fk * _inv_pow(y, k + 1)]
    terms.extend(_asymptotic_tail(k, y))
    terms.extend(fk * _inv_pow(x + j, k + 1) for j in range(1, n))
    if n:
        if x < 1.0:
            # k!/x^(k+1) dominates the sum for small x: form it exactly and
            # pass hi + lo to fsum so the result stays within about an ulp.
            terms.extend(_exact_split(fk / Fraction(x) ** (k + 1)))
        else:
            terms.append(fk * _inv_pow(x, k + 1))
    if any(math.isinf(t) for t in terms):
        return math.inf
    return fsum(terms)


def polygamma(k, x) -> float:
    """psi^(k)(x) for 1 <= k <= 8 and x > 0.

    The sign of the result is (-1)^(k+1).
    """
    k = deriv_order(k, 1, MAX_POLYGAMMA_ORDER)
    x = positive_real(x)
    v = _polygamma_abs(k, x)
    return v if k % 2 == 1 else -v


def trigamma(x) -> float:
    """psi'(x); shorthand for ``polygamma(1, x)``."""
    return _polygamma_abs(1, positive_real(x))


def _binet_step(y: float, n: int = 0) -> float:
    """n-th derivative of theta(y) - theta(y + 1) = (y + 1/2) ln(1 + 1/y) - 1.

    With w = 1/(2y + 1) this difference is atanh(w)/w - 1 = sum_k w^2k/(2k+1),
    a series of same-signed terms; it is used for y >= 1/2 (w <= 1/2).
    """
    if y < 0.5:
        if n:
            raise ValueError("series form needs y >= 1/2")
        return (y + 0.5) * math.log1p(1.0 / y) - 1.0
    w = 1.0 / (2.0 * y + 1.0)
    w2 = w * w
    wp = w2 * w**n
    terms = []
    for k in range(1, 400):
        rising = 1
        for i in range(n):
            rising *= 2 * k + i
        t = rising * wp / (2 * k + 1)
        terms.append(t)
        if t < 1e-18 * terms[0] and k > n:
            break
        wp *= w2
    v = fsum(terms) * 2.0**n
    return v if n % 2 == 0 else -v


def stirling_remainder_with_scale(x: float, n: int = 0) -> tuple:
    """Return ``(theta^(n)(x), scale)`` for the Binet remainder theta.

    ``scale`` is the sum of magnitudes of the terms combined, i.e. the size
    of the floating-point error budget of the returned value.
    """
    start = _shift_point(n - 1) if n else SHIFT_POINT
    if x >= start:
        terms = _asymptotic_tail(n - 1, x)
        v = fsum(terms)
        scale = fsum(abs(t) for t in terms)
        return (v if n % 2 == 0 else -v), scale
    if x >= 0.5 or n == 0:
        # theta^(n)(x) = theta^(n)(x + m) + sum_j step^(n)(x + j); one sign throughout
        m = int(math.ceil(start - x))
        tail, _ = stirling_remainder_with_scale(x + m, n)
        parts = [tail]
        parts.extend(_binet_step(x + j, n) for j in range(m))
        v = fsum(parts)
        return v, abs(v)
    # theta^(n) = psi^(n-1)(x) - d^n/dx^n [(x - 1/2) ln x - x]
    if n == 1:
        parts = [digamma(x), -math.log(x), 0.5 / x]
    else:
        sign = 1.0 if n % 2 == 0 else -1.0
        parts = [
            polygamma(n - 1, x),
            -sign * math.factorial(n - 2) * _inv_pow(x, n - 1),
            -sign * 0.5 * math.factorial(n - 1) * _inv_pow(x, n),
        ]
    return fsum(parts), fsum(abs(p) for p in parts)


def stirling_remainder(x, n: int = 0) -> float:
    """n-th derivative of the Binet remainder

        theta(x) = ln Gamma(x) - (x - 1/2) ln x + x - ln(2 pi)/2,

    evaluated without forming ln Gamma, so it keeps full relative accuracy
    for large x where theta(x) ~ 1/(12 x).
    """
    x = positive_real(x)
    n = deriv_order(n, 0, MAX_POLYGAMMA_ORDER + 1)
    return stirling_remainder_with_scale(x, n)[0]
