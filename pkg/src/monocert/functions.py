"""The trigamma-corrected Stirling remainder f_a and its Laplace kernels.

    f_a(x) = ln(2 pi)/2 - x + (x - 1/2) ln x - ln Gamma(x) + psi'(x + a)/12
           = psi'(x + a)/12 - theta(x)

with theta the Binet remainder.  The second form is what is evaluated: it
avoids subtracting two copies of ln Gamma(x) and keeps f_a accurate where it
is O(1/x^2) small.

Kernel side (t > 0):

    phi_a(t)  = (1 + e^-t)/2 + (e^-t - 1)/t - t^2 e^-at / 12
              = (t^2/12) (phi1(t) - e^-at)
    phi1(t)   = (12/t^2) [(1 + e^-t)/2 + (e^-t - 1)/t]
    -phi(t)   = -ln(phi1(t)) / t                       (the threshold curve)
    phi2(u)   = -phi1'(u) / phi1(u)

All of these are written in terms of D(t) = (t - 2) e^t + t + 2, whose
Maclaurin series sum_{n>=3} (n-2) t^n / n! has only positive terms, so the
small-argument forms are free of cancellation.
"""

from __future__ import annotations

import math
from math import fsum

import numpy as np

from .errors import DomainError
from .quadrature import QuadratureConfig, QuadratureResult, integrate_truncated
from .special import (
    HALF_LOG_TWO_PI,
    deriv_order,
    ln_gamma,
    polygamma,
    positive_real,
    stirling_remainder_with_scale,
    trigamma,
)

__all__ = [
    "MAX_FA_DERIVATIVE",
    "SERIES_SWITCH",
    "shift_param",
    "F_a",
    "f_a",
    "f_a_direct",
    "g_a",
    "f_a_derivative",
    "f_a_derivative_with_scale",
    "binet_theta",
    "theta_representation_check",
    "phi_kernel",
    "phi1",
    "phi_threshold",
    "phi_threshold_binet_form",
    "phi2",
    "binet_bracket",
    "difference_closed_form",
    "difference_derivative_closed_form",
    "laplace_difference_derivative",
]

MAX_FA_DERIVATIVE = 7

# Below this argument the positive-term series are used; above it the
# exponentially scaled closed forms, which have no cancellation for t > 2.
SERIES_SWITCH = 4.0

_N_SERIES = 48
# S(t) = D(t)/t^3 = sum_k (k+1)/(k+3)! t^k
_S_COEFFS = np.array([(k + 1) / math.factorial(k + 3) for k in range(_N_SERIES)])
# R(t) = N(t)/t^4 = sum_k (2k+2)/(k+4)! t^k,  N(t) = 2(t-3)e^t + t^2 + 4t + 6
_R_COEFFS = np.array([(2 * k + 2) / math.factorial(k + 4) for k in range(_N_SERIES)])


def shift_param(a) -> float:
    """Validate the shift a >= 0 (finite)."""
    try:
        v = float(a)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"shift must be a real number, got {a!r}") from exc
    if not math.isfinite(v) or v < 0.0:
        raise DomainError(f"shift must be finite and >= 0, got {a!r}")
    return v


def _horner(coeffs: np.ndarray, t):
    acc = np.zeros_like(t) + coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * t + c
    return acc


def _as_points(t):
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError("kernel arguments must be finite and > 0")
    return arr


def _scalar_or_array(template, values):
    return float(values) if np.ndim(template) == 0 else values


# ---------------------------------------------------------------- f_a family


def f_a(a, x) -> float:
    """f_a(x) = psi'(x + a)/12 - theta(x)."""
    a = shift_param(a)
    x = positive_real(x)
    theta, _ = stirling_remainder_with_scale(x, 0)
    return trigamma(x + a) / 12.0 - theta


def f_a_direct(a, x) -> float:
    """f_a(x) summed term by term from ln Gamma; reference form for moderate x."""
    a = shift_param(a)
    x = positive_real(x)
    return fsum(
        [HALF_LOG_TWO_PI, -x, (x - 0.5) * math.log(x), -ln_gamma(x), trigamma(x + a) / 12.0]
    )


def F_a(a, x) -> float:
    """F_a(x) = ln Gamma(x) - (x - 1/2) ln x - psi'(x + a)/12."""
    a = shift_param(a)
    x = positive_real(x)
    theta, _ = stirling_remainder_with_scale(x, 0)
    return fsum([theta, -x, HALF_LOG_TWO_PI, -trigamma(x + a) / 12.0])


def g_a(a, x) -> float:
    """g_a(x) = f_a(x) - ln(2 pi)/2."""
    return f_a(a, x) - HALF_LOG_TWO_PI


def f_a_derivative_with_scale(a: float, x: float, i: int) -> tuple:
    """``(f_a^(i)(x), scale)`` where scale bounds the magnitude of the summands.

    i = 0 is allowed and returns f_a itself.
    """
    theta, theta_scale = stirling_remainder_with_scale(x, i)
    psi = polygamma(i + 1, x + a) / 12.0
    return psi - theta, abs(psi) + theta_scale


def f_a_derivative(a, x, i) -> float:
    """Analytic i-th derivative of f_a, 1 <= i <= 7.

        f_a'(x)     = psi''(x + a)/12 - psi(x) + ln x - 1/(2x)
        f_a^(i)(x)  = psi^(i+1)(x + a)/12 - psi^(i-1)(x)
                      + (-1)^i (i-2)!/x^(i-1) + (-1)^i (i-1)!/(2 x^i)
    """
    a = shift_param(a)
    x = positive_real(x)
    i = deriv_order(i, 1, MAX_FA_DERIVATIVE)
    return f_a_derivative_with_scale(a, x, i)[0]


# ---------------------------------------------------------------- differences


def difference_closed_form(a, x) -> float:
    """f_a(x) - f_a(x + 1) = 1 + (x + 1/2) ln(x/(x+1)) + 1/(12 (x + a)^2)."""
    a = shift_param(a)
    x = positive_real(x)
    return fsum([1.0, -(x + 0.5) * math.log1p(1.0 / x), 1.0 / (12.0 * (x + a) ** 2)])


def difference_derivative_closed_form(a, x) -> float:
    """d/dx [f_a(x) - f_a(x + 1)]."""
    a = shift_param(a)
    x = positive_real(x)
    return fsum(
        [0.5 / (x + 1.0), 0.5 / x, -1.0 / (6.0 * (a + x) ** 3), -math.log1p(1.0 / x)]
    )


# ---------------------------------------------------------------- kernels


def _scaled_D(t: np.ndarray, switch: float):
    """(phi1(t), ln phi1(t)) with phi1 = 6 e^-t D(t) / t^3."""
    out = np.empty_like(t)
    log_out = np.empty_like(t)
    small = t <= switch
    if np.any(small):
        ts = t[small]
        S = _horner(_S_COEFFS, ts)
        six_s_minus_one = 6.0 * ts * _horner(_S_COEFFS[1:], ts)
        out[small] = 6.0 * np.exp(-ts) * S
        log_out[small] = np.log1p(six_s_minus_one) - ts
    big = ~small
    if np.any(big):
        tb = t[big]
        e = (tb - 2.0) + (tb + 2.0) * np.exp(-tb)
        out[big] = 6.0 * e / tb**3
        log_out[big] = np.log(6.0 * e) - 3.0 * np.log(tb)
    return out, log_out


def phi1(t, switch: float = SERIES_SWITCH):
    """phi1(t) = (12/t^2)[(1 + e^-t)/2 + (e^-t - 1)/t], decreasing from 1 to 0."""
    arr = _as_points(t)
    flat = np.atleast_1d(arr).astype(float)
    val, _ = _scaled_D(flat, switch)
    return _scalar_or_array(t, val.reshape(np.shape(arr)))


def phi_threshold(t, switch: float = SERIES_SWITCH):
    """-phi(t) = -ln(phi1(t))/t, the critical shift at transform variable t.

    phi_a(t) > 0 exactly when a > -phi(t).  Values lie in (0, 1/2).
    """
    arr = _as_points(t)
    flat = np.atleast_1d(arr).astype(float)
    small = flat <= switch
    out = np.empty_like(flat)
    if np.any(small):
        ts = flat[small]
        six_s_minus_one = 6.0 * ts * _horner(_S_COEFFS[1:], ts)
        # -ln(phi1)/t = 1 - log1p(6S - 1)/t
        out[small] = 1.0 - np.log1p(six_s_minus_one) / ts
    if np.any(~small):
        _, lg = _scaled_D(flat[~small], switch)
        out[~small] = -lg / flat[~small]
    return _scalar_or_array(t, out.reshape(np.shape(arr)))


def binet_bracket(t, switch: float = SERIES_SWITCH):
    """1/(e^t - 1) - 1/t + 1/2 = D(t) / (2 t (e^t - 1)); ~ t/12 near 0."""
    arr = _as_points(t)
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    small = flat <= switch
    if np.any(small):
        ts = flat[small]
        out[small] = ts * ts * _horner(_S_COEFFS, ts) / (2.0 * np.expm1(ts))
    if np.any(~small):
        tb = flat[~small]
        eb = np.exp(-tb)
        out[~small] = ((tb - 2.0) + (tb + 2.0) * eb) / (2.0 * tb * (-np.expm1(-tb)))
    return _scalar_or_array(t, out.reshape(np.shape(arr)))


def phi_threshold_binet_form(t, switch: float = SERIES_SWITCH):
    """-(1/t) ln[ 12 (e^t - 1)/(t^2 e^t) * (1/(e^t - 1) - 1/t + 1/2) ].

    Algebraically identical to ``phi_threshold``; evaluated through the Binet
    bracket so the two can be cross-checked.
    """
    arr = _as_points(t)
    flat = np.atleast_1d(arr).astype(float)
    q = 12.0 * (-np.expm1(-flat)) * binet_bracket(flat, switch) / flat**2
    out = -np.log(q) / flat
    return _scalar_or_array(t, out.reshape(np.shape(arr)))


def _bracket_minus_expm1(b: float, t: np.ndarray) -> np.ndarray:
    """(6S(t) - 1) - expm1(b t) without cancellation near t = 0.

    For t <= 1 the two expansions are merged coefficient by coefficient,
    c_k = 6(k+1)/(k+3)! - b^k/k!, so a vanishing leading coefficient (b = 1/2)
    costs no accuracy.
    """
    out = 6.0 * t * _horner(_S_COEFFS[1:], t) - np.expm1(b * t)
    tiny = t <= 1.0
    if np.any(tiny):
        tt = t[tiny]
        acc = np.zeros_like(tt)
        power = np.ones_like(tt)
        for k in range(1, 60):
            power = power * tt
            c = 6.0 * (k + 1) / math.factorial(k + 3) - b**k / math.factorial(k)
            acc += c * power
            if abs(c) < 1e-18 and abs(b) ** k / math.factorial(k) < 1e-18:
                break
        out[tiny] = acc
    return out


def phi_kernel(a, t, switch: float = SERIES_SWITCH):
    """phi_a(t) = (t^2/12)(phi1(t) - e^-at).

    Its Laplace transform is d/dx [f_a(x) - f_a(x + 1)].
    """
    a = shift_param(a)
    arr = _as_points(t)
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    small = flat <= switch
    if np.any(small):
        ts = flat[small]
        # phi1 - e^-at = e^-t [(6S - 1) - expm1((1 - a) t)]
        out[small] = np.exp(-ts) * _bracket_minus_expm1(1.0 - a, ts)
    if np.any(~small):
        tb = flat[~small]
        p1, _ = _scaled_D(tb, switch)
        out[~small] = p1 - np.exp(-a * tb)
    out *= flat * flat / 12.0
    return _scalar_or_array(t, out.reshape(np.shape(arr)))


def phi2(u, switch: float = SERIES_SWITCH):
    """phi2(u) = [2(u-3)e^u + u^2 + 4u + 6] / (u [(u-2)e^u + u + 2]) = -phi1'/phi1."""
    arr = _as_points(u)
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    small = flat <= switch
    if np.any(small):
        us = flat[small]
        out[small] = _horner(_R_COEFFS, us) / _horner(_S_COEFFS, us)
    if np.any(~small):
        ub = flat[~small]
        eb = np.exp(-ub)
        num = 2.0 * (ub - 3.0) + (ub * ub + 4.0 * ub + 6.0) * eb
        den = ub * ((ub - 2.0) + (ub + 2.0) * eb)
        out[~small] = num / den
    return _scalar_or_array(u, out.reshape(np.shape(arr)))


# ---------------------------------------------------------------- quadrature


def binet_theta(x, cfg: QuadratureConfig = QuadratureConfig(), route: str = "exp_kernel") -> QuadratureResult:
    """Binet remainder theta(x) by quadrature.

    route="exp_kernel":    int_0^inf (1/(e^t-1) - 1/t + 1/2) e^-xt / t dt
    route="arctan_kernel": 2 int_0^inf arctan(t/x) / (e^(2 pi t) - 1) dt

    Raises ConvergenceError when a fixed ``cfg.truncation_T`` leaves a tail
    larger than ``cfg.tolerance``.
    """
    x = positive_real(x)
    switch = cfg.series_switch
    if route == "exp_kernel":

        def integrand(t):
            return binet_bracket(t, switch) / t * np.exp(-x * t)

        def tail(T):
            return math.exp(-x * T) / (2.0 * T * x)

        return integrate_truncated(integrand, tail, cfg, panel_width=min(1.0, 2.0 / x))
    if route == "arctan_kernel":

        def integrand(t):
            return 2.0 * np.arctan(t / x) / np.expm1(2.0 * math.pi * t)

        def tail(T):
            return 0.5 * math.pi * math.exp(-2.0 * math.pi * T)

        return integrate_truncated(integrand, tail, cfg, panel_width=min(0.5, 0.5 * x))
    raise ValueError(f"unknown route {route!r}; expected exp_kernel or arctan_kernel")


def theta_representation_check(a, x, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """f_a(x) - [psi'(x + a)/12 - theta(x)] with f_a from ln Gamma, theta by quadrature."""
    a = shift_param(a)
    x = positive_real(x)
    theta = binet_theta(x, cfg, "exp_kernel").value
    return fsum([f_a_direct(a, x), -trigamma(x + a) / 12.0, theta])


def laplace_difference_derivative(a, x, cfg: QuadratureConfig = QuadratureConfig()) -> QuadratureResult:
    """int_0^inf phi_a(t) e^-xt dt, to be compared with the closed form."""
    a = shift_param(a)
    x = positive_real(x)

    def integrand(t):
        return phi_kernel(a, t, cfg.series_switch) * np.exp(-x * t)

    def tail(T):
        # |phi_a(t)| <= 1 + t^2/12
        poly = 1.0 / x + (T * T / x + 2.0 * T / x**2 + 2.0 / x**3) / 12.0
        return math.exp(-x * T) * poly

    return integrate_truncated(integrand, tail, cfg, panel_width=min(1.0, 2.0 / x))
