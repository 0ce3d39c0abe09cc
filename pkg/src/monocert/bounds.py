"""Certified two-sided bounds for Gamma(x) and gamma ratios.

All bounds are formed in log space and every margin is rewritten in terms of
f_a or derivatives of the Binet remainder theta.  This avoids subtracting
two large, nearly equal logarithms.  For example, with

    B_a(x) = sqrt(2 pi) x^(x - 1/2) exp(psi'(x + a)/12 - x)

one has ln Gamma(x) - ln B_a(x) = -f_a(x) exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import fsum
from typing import Dict, List, Optional, Sequence, Tuple

from .cmverify import DEAD_BAND, ClaimResult, GridSpec, certified_sign
from .errors import DomainError
from .functions import f_a_derivative_with_scale, shift_param
from .parallel import ordered_map
from .special import (
    BERNOULLI,
    HALF_LOG_TWO_PI,
    ln_gamma,
    positive_real,
    stirling_remainder_with_scale,
    trigamma,
)

__all__ = [
    "BoundPair",
    "Counterexample",
    "CounterexampleSearch",
    "gamma_bounds",
    "gamma_ratio_bounds",
    "gamma_bound_counterexample",
    "relative_width",
    "width_decay_ratio",
    "lemma_inequalities_check",
    "asymptotic_limit_checks",
]


def _exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def _expm1(v: float) -> float:
    try:
        return math.expm1(v)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class BoundPair:
    """A log-space enclosure log_lower < log_target < log_upper.

    ``lower_margin`` = log_target - log_lower and ``upper_margin`` =
    log_upper - log_target are computed in cancellation-free form; their
    rounding scales feed the same dead band as the CM sweeps.
    """

    log_lower: float
    log_upper: float
    log_target: Optional[float]
    params: Dict[str, float]
    lower_margin: Optional[float] = None
    upper_margin: Optional[float] = None
    lower_scale: float = 0.0
    upper_scale: float = 0.0
    dead_band: float = DEAD_BAND

    @property
    def lower(self) -> float:
        return _exp(self.log_lower)

    @property
    def upper(self) -> float:
        return _exp(self.log_upper)

    @property
    def target(self) -> Optional[float]:
        return None if self.log_target is None else _exp(self.log_target)

    @property
    def relative_width(self) -> float:
        return _expm1(self.log_upper - self.log_lower)

    def direct_margins(self) -> Tuple[float, float]:
        """Margins from the three logarithms directly (for cross-checking)."""
        return self.log_target - self.log_lower, self.log_upper - self.log_target

    @property
    def lower_sign(self) -> int:
        return certified_sign(self.lower_margin, self.lower_scale, self.dead_band)

    @property
    def upper_sign(self) -> int:
        return certified_sign(self.upper_margin, self.upper_scale, self.dead_band)

    @property
    def contains(self) -> bool:
        """Strict containment, certified outside the dead band on both sides."""
        return self.lower_sign > 0 and self.upper_sign > 0

    @property
    def passed(self) -> bool:
        return self.contains


def _stirling_log(x: float) -> float:
    # ln sqrt(2 pi) + (x - 1/2) ln x - x
    return fsum([HALF_LOG_TWO_PI, (x - 0.5) * math.log(x), -x])


def gamma_bounds(x, alpha=0.0, beta=0.5, dead_band: float = DEAD_BAND) -> BoundPair:
    """sqrt(2pi) x^(x-1/2) e^(psi'(x+beta)/12 - x) < Gamma(x) < same with alpha.

    Valid for every x > 0 exactly when alpha = 0 and beta >= 1/2.
    """
    x = positive_real(x)
    alpha, beta = shift_param(alpha), shift_param(beta)
    base = _stirling_log(x)
    fb, sb = f_a_derivative_with_scale(beta, x, 0)
    fa, sa = f_a_derivative_with_scale(alpha, x, 0)
    return BoundPair(
        log_lower=base + trigamma(x + beta) / 12.0,
        log_upper=base + trigamma(x + alpha) / 12.0,
        log_target=ln_gamma(x),
        params={"x": x, "alpha": alpha, "beta": beta},
        lower_margin=-fb,
        upper_margin=fa,
        lower_scale=sb,
        upper_scale=sa,
        dead_band=dead_band,
    )


def relative_width(x, alpha=0.0, beta=0.5) -> float:
    """(upper - lower) / lower of the Gamma enclosure."""
    x = positive_real(x)
    alpha, beta = shift_param(alpha), shift_param(beta)
    return _expm1((trigamma(x + alpha) - trigamma(x + beta)) / 12.0)


def width_decay_ratio(x, alpha=0.0, beta=0.5) -> float:
    """relative_width(x) / relative_width(2x); tends to 4 as x grows."""
    x = positive_real(x)
    return relative_width(x, alpha, beta) / relative_width(2.0 * x, alpha, beta)


def gamma_ratio_bounds(x, s, t, alpha=0.5, beta=0.0, dead_band: float = DEAD_BAND) -> BoundPair:
    """Two-sided bound for R = Gamma(x+s)/Gamma(x+t) * (x+t)^(x+t-1/2) / (x+s)^(x+s-1/2).

    With E_a = exp[t - s + (psi'(x+s+a) - psi'(x+t+a))/12] one has
    ln R - ln E_a = -[f_a(x+s) - f_a(x+t)].  Hence E_alpha < R < E_beta for
    all x > -s exactly when beta = 0 and alpha >= 1/2: the lower bound uses
    ``alpha`` and the upper bound uses ``beta``.
    """
    s, t = float(s), float(t)
    if not (math.isfinite(s) and math.isfinite(t)) or not s < t:
        raise DomainError(f"need finite s < t, got s={s}, t={t}")
    x = float(x)
    if not math.isfinite(x) or not x + s > 0.0:
        raise DomainError(f"need x > -s, got x={x}, s={s}")
    alpha, beta = shift_param(alpha), shift_param(beta)
    xs, xt = x + s, x + t

    def log_e(a):
        return fsum([t - s, (trigamma(xs + a) - trigamma(xt + a)) / 12.0])

    def diff(a):
        v1, s1 = f_a_derivative_with_scale(a, xs, 0)
        v2, s2 = f_a_derivative_with_scale(a, xt, 0)
        return fsum([v1, -v2]), s1 + s2

    log_target = fsum(
        [ln_gamma(xs), -ln_gamma(xt), (xt - 0.5) * math.log(xt), -(xs - 0.5) * math.log(xs)]
    )
    d_lo, s_lo = diff(alpha)
    d_hi, s_hi = diff(beta)
    return BoundPair(
        log_lower=log_e(alpha),
        log_upper=log_e(beta),
        log_target=log_target,
        params={"x": x, "s": s, "t": t, "alpha": alpha, "beta": beta},
        lower_margin=-d_lo,
        upper_margin=d_hi,
        lower_scale=s_lo,
        upper_scale=s_hi,
        dead_band=dead_band,
    )


# --------------------------------------------------------------------------
# sharpness: counterexamples for off-threshold parameters


@dataclass(frozen=True)
class Counterexample:
    x_witness: float
    violated_side: str
    margin: float


@dataclass(frozen=True)
class CounterexampleSearch:
    side: str
    a: float
    witness: Optional[Counterexample]
    searched: Tuple[float, float]
    evaluations: int
    # (last passing x, first failing x) after bisection, bracketing the
    # point where the bound starts to fail; None if the first scan point fails.
    onset: Optional[Tuple[float, float]]
    # True when the scan ran off the end of its range without a violation.
    # This only means the search was insufficient; no counterexample in a
    # finite scan is not a proof that none exists.
    exhausted: bool

    @property
    def found(self) -> bool:
        return self.witness is not None


DEFAULT_SEARCH = {
    "lower": (1e-3, 1e6),
    "upper": (1e-300, 1.0),
}


def gamma_bound_counterexample(
    side: str,
    a,
    search: Optional[GridSpec] = None,
    dead_band: float = DEAD_BAND,
    factor: float = 2.0,
) -> CounterexampleSearch:
    """Look for x where the Gamma bound with shift ``a`` on ``side`` fails.

    lower side (bound uses beta = a): fails where f_a(x) > 0, which happens
    at large x when a < 1/2.  The scan runs upward from the smallest point.
    upper side (bound uses alpha = a): fails where f_a(x) < 0, which happens
    as x -> 0+ when a > 0.  The scan runs downward from the largest point.

    Only the end points of ``search`` are used.  The range is scanned
    geometrically by ``factor``.  The first scan point with a certified
    violation is the witness.  The boundary between it and the previous
    (passing) scan point is then bracketed by bisection in log x and
    reported as ``onset``.
    """
    if side not in ("lower", "upper"):
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    a = shift_param(a)
    if not factor > 1.0:
        raise ValueError("factor must be > 1")
    lo, hi = (search.points[0], search.points[-1]) if search else DEFAULT_SEARCH[side]
    evaluations = 0

    def margin(x):
        nonlocal evaluations
        evaluations += 1
        v, sc = f_a_derivative_with_scale(a, x, 0)
        m = -v if side == "lower" else v
        return m, certified_sign(m, sc, dead_band) < 0

    if side == "lower":
        x, step, inside = lo, factor, (lambda v: v <= hi)
    else:
        x, step, inside = hi, 1.0 / factor, (lambda v: v >= lo)
    prev = None
    hit = None
    while inside(x):
        m, bad = margin(x)
        if bad:
            hit = (x, m)
            break
        prev = x
        nxt = x * step
        if not inside(nxt) and inside(x) and x not in (lo, hi):
            nxt = hi if side == "lower" else lo
        x = nxt
    if hit is None:
        return CounterexampleSearch(side, a, None, (lo, hi), evaluations, None, True)
    witness = Counterexample(hit[0], side, hit[1])
    x_bad = hit[0]
    onset = None
    if prev is not None:
        good = prev
        for _ in range(200):
            mid = math.sqrt(good * x_bad)
            if not min(good, x_bad) < mid < max(good, x_bad):
                break
            _, bad = margin(mid)
            if bad:
                x_bad = mid
            else:
                good = mid
            if abs(x_bad - good) <= 1e-12 * x_bad:
                break
        onset = (good, x_bad)
    return CounterexampleSearch(side, a, witness, (lo, hi), evaluations, onset, False)


# --------------------------------------------------------------------------
# lemma inequalities and limits


def _claim_from_margins(claim_id, xs, margins_and_scales, dead_band, description):
    signs = [certified_sign(m, sc, dead_band) for m, sc in margins_and_scales]
    first = next((x for x, sg in zip(xs, signs) if sg < 0), None)
    idx = min(range(len(xs)), key=lambda i: margins_and_scales[i][0])
    return ClaimResult(
        claim_id=claim_id,
        index_range=(xs[0], xs[-1]),
        holds=first is None,
        first_violation=first,
        min_margin=margins_and_scales[idx][0],
        min_margin_at=xs[idx],
        checked=len(xs),
        inconclusive=sum(1 for sg in signs if sg == 0),
        description=description,
    )


def _theta2_tail(x: float, skip: int) -> Tuple[float, float]:
    """theta''(x) minus its first ``skip`` asymptotic terms sum_j B_2j x^-(2j+1)."""
    if x >= 10.0:
        terms = [float(b) * x ** -(2 * j + 1) for j, b in enumerate(BERNOULLI, start=1)][skip:]
        return fsum(terms), fsum(abs(v) for v in terms)
    v, sc = stirling_remainder_with_scale(x, 2)
    head = [-float(b) * x ** -(2 * j + 1) for j, b in enumerate(BERNOULLI[:skip], start=1)]
    return fsum([v] + head), sc + fsum(abs(h) for h in head)


def lemma_inequalities_check(
    grid: Optional[GridSpec] = None,
    orders: Sequence[int] = range(1, 7),
    dead_band: float = DEAD_BAND,
) -> List[ClaimResult]:
    """Strict checks, at every grid point, of

    * ln x - 1/x < psi(x) < ln x - 1/(2x);
    * (i-1)!/x^i + i!/(2x^(i+1)) < (-1)^(i+1) psi^(i)(x) < (i-1)!/x^i + i!/x^(i+1), i in orders;
    * 1/(2x^2) - 1/(6x^3) < 1/x - psi'(x+1) < 1/(2x^2) - 1/(6x^3) + 1/(30x^5).

    Each margin is rewritten through the Binet remainder theta, e.g.
    (-1)^(i+1) psi^(i)(x) - (i-1)!/x^i - i!/(2x^(i+1)) = (-1)^(i+1) theta^(i+1)(x).
    """
    grid = grid or GridSpec.log(0.01, 100.0, 200)
    orders = list(orders)
    for i in orders:
        if isinstance(i, bool) or int(i) != i or not 1 <= i <= 6:
            raise ValueError(f"orders must lie in [1, 6], got {i!r}")
    xs = list(grid.points)

    def digamma_margins(x):
        t1, sc = stirling_remainder_with_scale(x, 1)  # theta' = psi - ln x + 1/(2x) < 0
        half = 0.5 / x
        return [(t1 + half, sc + half), (-t1, sc)]

    def window_margins(i):
        def fn(x):
            th, sc = stirling_remainder_with_scale(x, i + 1)
            th = th if (i + 1) % 2 == 0 else -th  # (-1)^(i+1) theta^(i+1) > 0
            gap = 0.5 * math.factorial(i) * x ** -(i + 1)
            return [(th, sc), (gap - th, gap + sc)]

        return fn

    def lemma_margins(x):
        lower = _theta2_tail(x, 1)  # 1/(6x^3) - theta''  = -(tail after 1 term)
        upper = _theta2_tail(x, 2)  # theta'' - 1/(6x^3) + 1/(30x^5)
        return [(-lower[0], lower[1]), upper]

    results = []
    dg = ordered_map(digamma_margins, xs)
    results.append(_claim_from_margins("digamma_window_lower", xs, [m[0] for m in dg], dead_band, "ln x - 1/x < psi(x)"))
    results.append(_claim_from_margins("digamma_window_upper", xs, [m[1] for m in dg], dead_band, "psi(x) < ln x - 1/(2x)"))
    for i in orders:
        w = ordered_map(window_margins(i), xs)
        results.append(
            _claim_from_margins(
                f"polygamma_window_lower_{i}", xs, [m[0] for m in w], dead_band,
                f"({i}-1)!/x^{i} + {i}!/(2x^{i + 1}) < (-1)^({i}+1) psi^({i})(x)",
            )
        )
        results.append(
            _claim_from_margins(
                f"polygamma_window_upper_{i}", xs, [m[1] for m in w], dead_band,
                f"(-1)^({i}+1) psi^({i})(x) < ({i}-1)!/x^{i} + {i}!/x^{i + 1}",
            )
        )
    lm = ordered_map(lemma_margins, xs)
    results.append(
        _claim_from_margins("trigamma_shift_lower", xs, [m[0] for m in lm], dead_band, "1/(2x^2) - 1/(6x^3) < 1/x - psi'(x+1)")
    )
    results.append(
        _claim_from_margins(
            "trigamma_shift_upper", xs, [m[1] for m in lm], dead_band,
            "1/x - psi'(x+1) < 1/(2x^2) - 1/(6x^3) + 1/(30x^5)",
        )
    )
    return results


def _limit_claim(claim_id, x, value, target, tolerance, description):
    err = abs(value - target)
    ok = err <= tolerance
    return ClaimResult(
        claim_id=claim_id,
        index_range=(x, x),
        holds=ok,
        first_violation=None if ok else x,
        min_margin=tolerance - err,
        min_margin_at=x,
        checked=1,
        description=f"{description}: value {value:.12g}, target {target:.12g}",
    )


def asymptotic_limit_checks(x: float = 1e4, tolerance: float = 1e-3) -> List[ClaimResult]:
    """Large-x limits evaluated at a single large x.

    * x^2 [psi'(x) - 1/x] -> 1/2
    * x^2 [ln sqrt(2pi) - x + (x-1/2) ln x - ln Gamma(x) + 1/(12(x+a))] -> -a/12,
      a in {0, 1/2, 1, 2}; the bracket equals 1/(12(x+a)) - theta(x), which is
      how it is evaluated.
    * x^2 f_a(x) -> (1 - 2a)/24 for a in {0, 1/4, 1/2, 1}.
    """
    x = positive_real(x)
    x2 = x * x
    out = [
        _limit_claim("trigamma_limit", x, x2 * (trigamma(x) - 1.0 / x), 0.5, tolerance, "x^2 [psi'(x) - 1/x] -> 1/2")
    ]
    theta, _ = stirling_remainder_with_scale(x, 0)
    for a in (0.0, 0.5, 1.0, 2.0):
        value = x2 * fsum([1.0 / (12.0 * (x + a)), -theta])
        out.append(
            _limit_claim(f"reciprocal_shift_limit_a={a:g}", x, value, -a / 12.0, tolerance, f"a={a:g}: x^2 [...] -> -a/12")
        )
    for a in (0.0, 0.25, 0.5, 1.0):
        value = x2 * f_a_derivative_with_scale(a, x, 0)[0]
        out.append(
            _limit_claim(f"fa_scaled_limit_a={a:g}", x, value, (1.0 - 2.0 * a) / 24.0, tolerance, f"a={a:g}: x^2 f_a(x) -> (1-2a)/24")
        )
    return out
