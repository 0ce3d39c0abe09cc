"""Numerical certification of complete monotonicity for f_a and its relatives.

A function h is completely monotonic (CM) on an interval when
(-1)^n h^(n)(x) >= 0 for every n >= 0.  Here that condition is sampled on a
finite grid for finitely many orders, using analytic derivatives.  Every
margin is compared against a dead band proportional to its own rounding
scale.  The verdicts are therefore finite-order, finite-grid evidence, not
proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import factorial, fsum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .functions import (
    MAX_FA_DERIVATIVE,
    f_a_derivative_with_scale,
    phi2,
    phi_kernel,
    phi_threshold,
    shift_param,
)
from .parallel import ordered_map
from .quadrature import QuadratureConfig, integrate_truncated
from .special import deriv_order, positive_real

__all__ = [
    "DEAD_BAND",
    "EVIDENCE_LABEL",
    "GridSpec",
    "Verdict",
    "MarginEntry",
    "CMReport",
    "ClaimResult",
    "KernelSignSummary",
    "ThresholdReport",
    "certified_sign",
    "theoretical_verdict",
    "classify_fa",
    "kernel_sign_sweep",
    "threshold_crossing",
    "threshold_curve_report",
    "threshold_integral_residual",
    "remark_criterion_check",
    "verify_series_claims",
    "series_partial_sum",
    "series_vs_direct",
    "logcm_difference_check",
]

# Relative dead band: a margin m whose rounding scale is s counts as sign
# evidence only when |m| > DEAD_BAND * s.
DEAD_BAND = 1e-11
EVIDENCE_LABEL = "finite-order evidence"
MAX_SWEEP_ORDER = 6


# --------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class GridSpec:
    """A finite, strictly increasing set of positive abscissae."""

    points: Tuple[float, ...]
    scale: str = "explicit"

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        if not pts:
            raise ValueError("grid must contain at least one point")
        for p in pts:
            if not math.isfinite(p) or p <= 0.0:
                raise DomainError(f"grid points must be finite and > 0, got {p!r}")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("grid points must be strictly increasing")
        if self.scale not in ("lin", "log", "explicit"):
            raise ValueError(f"unknown grid scale {self.scale!r}")
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return len(self.points)

    @classmethod
    def linear(cls, lo: float, hi: float, count: int) -> "GridSpec":
        lo, hi, count = _check_range(lo, hi, count)
        pts = np.linspace(lo, hi, count)
        return cls(tuple(pts.tolist()), "lin")

    @classmethod
    def log(cls, lo: float, hi: float, count: int) -> "GridSpec":
        lo, hi, count = _check_range(lo, hi, count)
        pts = np.geomspace(lo, hi, count)
        pts[0], pts[-1] = lo, hi
        return cls(tuple(pts.tolist()), "log")

    @classmethod
    def parse(cls, token: str) -> "GridSpec":
        """Parse ``min:max:count:lin|log``."""
        parts = token.split(":")
        if len(parts) != 4 or parts[3] not in ("lin", "log"):
            raise ValueError(f"grid must look like min:max:count:lin|log, got {token!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ValueError(f"bad number in grid {token!r}") from exc
        return cls.linear(lo, hi, count) if parts[3] == "lin" else cls.log(lo, hi, count)

    def to_dict(self) -> dict:
        return {
            "scale": self.scale,
            "count": self.count,
            "min": self.points[0],
            "max": self.points[-1],
        }


def _check_range(lo, hi, count):
    lo = positive_real(lo)
    hi = positive_real(hi)
    if not lo < hi:
        raise ValueError(f"grid needs min < max, got {lo} >= {hi}")
    if isinstance(count, bool) or int(count) != count or count < 2:
        raise ValueError(f"grid count must be an integer >= 2, got {count!r}")
    return lo, hi, int(count)


# --------------------------------------------------------------------------
# reports


class Verdict(str, Enum):
    COMPLETELY_MONOTONIC = "CompletelyMonotonic"
    NEGATIVE_COMPLETELY_MONOTONIC = "NegativeCompletelyMonotonic"
    NEITHER = "Neither"
    INCONCLUSIVE = "Inconclusive"


def certified_sign(margin: float, scale: float, dead_band: float = DEAD_BAND) -> int:
    """+1 / -1 if ``margin`` clears the dead band around zero, else 0."""
    if math.isnan(margin):
        return 0
    band = dead_band * abs(scale)
    if margin > band:
        return 1
    if margin < -band:
        return -1
    return 0


def theoretical_verdict(a: float) -> Verdict:
    """Expected classification of f_a: CM iff a = 0, -f_a CM iff a >= 1/2."""
    a = shift_param(a)
    if a == 0.0:
        return Verdict.COMPLETELY_MONOTONIC
    if a >= 0.5:
        return Verdict.NEGATIVE_COMPLETELY_MONOTONIC
    return Verdict.NEITHER


@dataclass(frozen=True)
class MarginEntry:
    order: int
    x: float
    value: float  # h^(n)(x)
    margin: float  # (-1)^n h^(n)(x)
    scale: float
    sign: int  # certified sign of the margin, 0 inside the dead band

    def as_tuple(self) -> Tuple[int, float, float]:
        return (self.order, self.x, self.margin)


@dataclass(frozen=True)
class CMReport:
    series: str
    verdict: Verdict
    orders: Tuple[int, ...]
    entries: Tuple[MarginEntry, ...]
    worst_witness: Optional[Tuple[int, float, float]]
    # certified margins < 0: evidence against h being CM
    violations: Tuple[Tuple[int, float, float], ...]
    # certified margins > 0: evidence against -h being CM
    negative_violations: Tuple[Tuple[int, float, float], ...]
    inconclusive: Tuple[Tuple[int, float, float], ...]
    dead_band: float
    expected: Optional[Verdict] = None
    details: Dict = field(default_factory=dict)
    evidence: str = EVIDENCE_LABEL

    @property
    def matches_expected(self) -> Optional[bool]:
        return None if self.expected is None else self.verdict == self.expected

    def margins(self) -> Dict[int, List[float]]:
        out: Dict[int, List[float]] = {n: [] for n in self.orders}
        for e in self.entries:
            out[e.order].append(e.margin)
        return out

    @property
    def passed(self) -> bool:
        ok = self.verdict != Verdict.INCONCLUSIVE
        if self.expected is not None:
            ok = ok and self.verdict == self.expected
        return ok and self.details.get("passed", True)


@dataclass(frozen=True)
class ClaimResult:
    claim_id: str
    index_range: Tuple[float, float]
    holds: bool
    first_violation: Optional[float]
    min_margin: float
    min_margin_at: Optional[float] = None
    checked: int = 0
    inconclusive: int = 0
    description: str = ""

    def __post_init__(self):
        if self.holds != (self.first_violation is None):
            raise ValueError("holds must be True exactly when there is no violation")

    @property
    def passed(self) -> bool:
        return self.holds and self.inconclusive == 0


def _classify(
    series: str,
    orders: Sequence[int],
    points: Sequence[float],
    evaluate: Callable[[float], List[Tuple[float, float]]],
    dead_band: float,
    expected: Optional[Verdict] = None,
) -> CMReport:
    """Turn per-point (value, scale) lists into a CM verdict.

    ``evaluate(x)`` returns one (h^(n)(x), scale) pair per entry of ``orders``.
    Neither wins over Inconclusive: two certified margins of opposite sign
    settle the question regardless of any noise-level margins elsewhere.
    """
    if not dead_band > 0:
        raise ValueError("dead_band must be > 0")
    per_point = ordered_map(evaluate, points)
    entries: List[MarginEntry] = []
    for idx, n in enumerate(orders):
        for x, vals in zip(points, per_point):
            value, scale = vals[idx]
            margin = value if n % 2 == 0 else -value
            entries.append(MarginEntry(n, x, value, margin, scale, certified_sign(margin, scale, dead_band)))
    neg = tuple(e.as_tuple() for e in entries if e.sign < 0)
    pos = tuple(e.as_tuple() for e in entries if e.sign > 0)
    unsure = tuple(e.as_tuple() for e in entries if e.sign == 0)
    if neg and pos:
        verdict = Verdict.NEITHER
    elif unsure:
        verdict = Verdict.INCONCLUSIVE
    elif pos:
        verdict = Verdict.COMPLETELY_MONOTONIC
    else:
        verdict = Verdict.NEGATIVE_COMPLETELY_MONOTONIC

    def rel(e: MarginEntry) -> float:
        return e.margin / e.scale if e.scale > 0 else math.copysign(math.inf, e.margin)

    if verdict == Verdict.COMPLETELY_MONOTONIC:
        worst = min(entries, key=rel)
    elif verdict == Verdict.NEGATIVE_COMPLETELY_MONOTONIC:
        worst = max(entries, key=rel)
    elif verdict == Verdict.NEITHER:
        worst = min(entries, key=rel)
    else:
        worst = min(entries, key=lambda e: abs(rel(e)))
    return CMReport(
        series=series,
        verdict=verdict,
        orders=tuple(orders),
        entries=tuple(entries),
        worst_witness=worst.as_tuple(),
        violations=neg,
        negative_violations=pos,
        inconclusive=unsure,
        dead_band=dead_band,
        expected=expected,
    )


def _orders(max_order, cap=MAX_FA_DERIVATIVE) -> Tuple[int, ...]:
    return tuple(range(deriv_order(max_order, 0, cap) + 1))


# --------------------------------------------------------------------------
# f_a itself


def classify_fa(
    a,
    grid: GridSpec,
    max_order: int = MAX_SWEEP_ORDER,
    dead_band: float = DEAD_BAND,
) -> CMReport:
    """Sign sweep of (-1)^n f_a^(n)(x) for n = 0..max_order over ``grid``."""
    a = shift_param(a)
    orders = _orders(max_order)

    def evaluate(x):
        return [f_a_derivative_with_scale(a, x, n) for n in orders]

    return _classify(f"f_a(a={a!r})", orders, grid.points, evaluate, dead_band, theoretical_verdict(a))


# --------------------------------------------------------------------------
# kernel side


@dataclass(frozen=True)
class KernelSignSummary:
    a: float
    kind: str  # AllPositive | AllNegative | Mixed
    positive: int
    negative: int
    zero: int
    crossing: Optional[Tuple[float, float]]
    grid_consistent: bool

    @property
    def passed(self) -> bool:
        return self.grid_consistent


def threshold_crossing(a, width: float = 1e-8) -> Tuple[float, float]:
    """Bracket t* with -phi(t*) = a for 0 < a < 1/2, to absolute width ``width``.

    -phi is strictly decreasing from 1/2 (t -> 0+) to 0 (t -> inf), so the
    crossing is unique and bisection on the sign of -phi(t) - a is certified
    up to the accuracy of -phi itself.
    """
    a = shift_param(a)
    if not 0.0 < a < 0.5:
        raise DomainError(f"a threshold crossing exists only for 0 < a < 1/2, got {a}")
    lo = hi = 1.0
    while phi_threshold(lo) - a <= 0.0:
        lo *= 0.5
    while phi_threshold(hi) - a >= 0.0:
        hi *= 2.0
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if phi_threshold(mid) - a > 0.0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def kernel_sign_sweep(a, t_grid: GridSpec) -> KernelSignSummary:
    """Sign of phi_a(t) over ``t_grid`` compared with the threshold curve.

    phi_a(t) > 0 exactly when a > -phi(t); since 0 < -phi < 1/2 the kernel is
    negative for a = 0, positive for a >= 1/2 and changes sign once otherwise.
    """
    a = shift_param(a)
    ts = np.asarray(t_grid.points)
    vals = np.asarray(phi_kernel(a, ts))
    pos, neg = int(np.sum(vals > 0)), int(np.sum(vals < 0))
    zero = len(ts) - pos - neg
    if a == 0.0:
        kind, crossing = "AllNegative", None
        consistent = neg == len(ts)
    elif a >= 0.5:
        kind, crossing = "AllPositive", None
        consistent = pos == len(ts)
    else:
        kind = "Mixed"
        crossing = threshold_crossing(a)
        below = ts < crossing[0]
        above = ts > crossing[1]
        consistent = bool(np.all(vals[below] < 0) and np.all(vals[above] > 0))
    return KernelSignSummary(a, kind, pos, neg, zero, crossing, consistent)


def threshold_integral_residual(t, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """-phi(t) - (1/t) * integral_0^t phi2(u) du, by Gauss-Legendre quadrature."""
    t = positive_real(t)
    fixed = QuadratureConfig(
        truncation_T=t,
        nodes=cfg.nodes,
        series_switch=cfg.series_switch,
        tolerance=cfg.tolerance,
        max_panel_width=cfg.max_panel_width,
    )
    res = integrate_truncated(lambda u: phi2(u, cfg.series_switch), lambda T: 0.0, fixed, 1.0)
    return phi_threshold(t, cfg.series_switch) - res.value / t


@dataclass(frozen=True)
class ThresholdReport:
    points: Tuple[float, ...]
    values: Tuple[float, ...]
    strictly_decreasing: bool
    first_violation: Optional[int]
    in_range: bool
    small_end: Optional[Dict]
    large_end: Optional[Dict]
    integral_residuals: Dict[float, float]
    integral_tolerance: float

    @property
    def passed(self) -> bool:
        ends = all(e is None or e["ok"] for e in (self.small_end, self.large_end))
        integrals = all(abs(r) <= self.integral_tolerance for r in self.integral_residuals.values())
        return self.strictly_decreasing and self.in_range and ends and integrals


def threshold_curve_report(
    t_grid: GridSpec,
    integral_points: Sequence[float] = (0.5, 2.0, 10.0),
    integral_tolerance: float = 1e-8,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> ThresholdReport:
    """Check monotonicity, range and both ends of the threshold curve -phi(t).

    Small end (t <= 1e-3): -phi(t) within 1e-3 of 1/2.
    Large end (t >= 40): -phi(t) against (3 ln t - ln(6(t - 2)))/t, which is
    exact up to O(e^-t) terms; relative tolerance 1e-9.
    """
    ts = t_grid.points
    vals = tuple(float(v) for v in np.asarray(phi_threshold(np.asarray(ts), cfg.series_switch)))
    first = next((i for i in range(1, len(vals)) if not vals[i] < vals[i - 1]), None)
    in_range = all(0.0 < v < 0.5 for v in vals)
    small = None
    if ts[0] <= 1e-3:
        small = {"t": ts[0], "value": vals[0], "target": 0.5, "tolerance": 1e-3, "ok": abs(vals[0] - 0.5) <= 1e-3}
    large = None
    if ts[-1] >= 40.0:
        t = ts[-1]
        target = (3.0 * math.log(t) - math.log(6.0 * (t - 2.0))) / t
        large = {
            "t": t,
            "value": vals[-1],
            "target": target,
            "tolerance": 1e-9,
            "ok": abs(vals[-1] - target) <= 1e-9 * target,
        }
    residuals = {float(t): threshold_integral_residual(t, cfg) for t in integral_points}
    return ThresholdReport(
        tuple(ts), vals, first is None, first, in_range, small, large, residuals, integral_tolerance
    )


# --------------------------------------------------------------------------
# difference criteria


def _difference_evaluator(a: float, s: float, t: float, orders):
    def evaluate(x):
        out = []
        for n in orders:
            v1, s1 = f_a_derivative_with_scale(a, x + s, n)
            v2, s2 = f_a_derivative_with_scale(a, x + t, n)
            out.append((fsum([v1, -v2]), s1 + s2))
        return out

    return evaluate


def remark_criterion_check(
    a,
    alpha_step: float = 1.0,
    grid: Optional[GridSpec] = None,
    max_order: int = MAX_SWEEP_ORDER,
    dead_band: float = DEAD_BAND,
    limit_x: float = 1e4,
    limit_tolerance: float = 1e-5,
) -> CMReport:
    """Difference criterion for complete monotonicity of f_a.

    f is CM on (0, inf) iff h(x) = f(x) - f(x + alpha) is CM and
    lim_{x->inf} (-1)^i f^(i)(x) >= 0 for every i.  The report classifies h on
    the grid and records, in ``details``:

    * ``limits``: (-1)^i f_a^(i)(limit_x), which must vanish to within
      ``limit_tolerance`` (the limit is 0 for every order);
    * ``forward_chain`` / ``reversed_chain``: whether
      (-1)^k f^(k+1)(x) >= (-1)^k f^(k+1)(x + alpha) (forward) or the
      reverse inequality holds at every grid point for k = 0..max_order-1.

    The verdict of h is the verdict of f when the limits hold.
    """
    a = shift_param(a)
    alpha_step = positive_real(alpha_step)
    grid = grid or GridSpec.log(0.05, 100.0, 200)
    orders = _orders(max_order)
    report = _classify(
        f"f_a(x)-f_a(x+{alpha_step!r}) (a={a!r})",
        orders,
        grid.points,
        _difference_evaluator(a, 0.0, alpha_step, orders),
        dead_band,
        theoretical_verdict(a),
    )
    limits = []
    for n in orders:
        v, _ = f_a_derivative_with_scale(a, limit_x, n)
        m = v if n % 2 == 0 else -v
        limits.append({"order": n, "x": limit_x, "margin": m, "ok": abs(m) <= limit_tolerance})
    # (-1)^k [f^(k+1)(x) - f^(k+1)(x+alpha)] = -(margin of h at order k+1)
    chain = [e for e in report.entries if e.order >= 1]
    forward = bool(chain) and all(e.sign < 0 for e in chain)
    reverse = bool(chain) and all(e.sign > 0 for e in chain)
    limits_ok = all(item["ok"] for item in limits)
    report.details.update(
        {
            "a": a,
            "alpha_step": alpha_step,
            "limits": limits,
            "limits_ok": limits_ok,
            "forward_chain": forward,
            "reversed_chain": reverse,
            "passed": limits_ok,
        }
    )
    return report


def logcm_difference_check(
    a,
    s: float,
    t: float,
    grid: Optional[GridSpec] = None,
    max_order: int = MAX_SWEEP_ORDER,
    dead_band: float = DEAD_BAND,
) -> CMReport:
    """Classify h(x) = f_a(x + s) - f_a(x + t), t > s, on the grid points x > -s.

    Expected: CM iff a = 0, negative-CM iff a >= 1/2, otherwise neither.  Grid
    points with x + s <= 0 are dropped.
    """
    a = shift_param(a)
    s, t = float(s), float(t)
    if not (math.isfinite(s) and math.isfinite(t)) or not t > s:
        raise DomainError(f"need finite s < t, got s={s}, t={t}")
    grid = grid or GridSpec.log(0.01, 100.0, 200)
    pts = tuple(x for x in grid.points if x + s > 0.0)
    if not pts:
        raise DomainError("no grid point satisfies x + s > 0")
    orders = _orders(max_order)
    report = _classify(
        f"f_a(x+{s!r})-f_a(x+{t!r}) (a={a!r})",
        orders,
        pts,
        _difference_evaluator(a, s, t, orders),
        dead_band,
        theoretical_verdict(a),
    )
    report.details.update({"a": a, "s": s, "t": t, "dropped_points": grid.count - len(pts)})
    return report


# --------------------------------------------------------------------------
# integer coefficient claims and the kernel series


def _claim_half(i: int) -> int:
    # coefficient factor in the series of phi_{1/2}; claimed > 0 for i >= 5
    return 3 * 2 ** (i - 2) - i * i + i


def _claim_zero(i: int) -> int:
    # coefficient of the (negated) series of phi_0; claimed >= 0 for i >= 4
    return (i - 3) * (i * i - 4)


def _claim_phi2(i: int) -> int:
    # coefficient in the series of the derivative of phi2; claimed > 0 for i >= 8
    return 2 ** (i - 1) * (i * i - 13 * i + 24) + i**4 - 6 * i**3 + 19 * i**2 - 14 * i - 24


_CLAIMS = (
    ("phi_half_coefficient", 5, _claim_half, True, "3*2^(i-2) - i^2 + i > 0"),
    ("phi_zero_coefficient", 4, _claim_zero, False, "(i-3)(i^2-4) >= 0"),
    ("phi2_derivative_coefficient", 8, _claim_phi2, True, "2^(i-1)(i^2-13i+24) + i^4-6i^3+19i^2-14i-24 > 0"),
)


def verify_series_claims(max_index: int = 1000) -> List[ClaimResult]:
    """Check the three integer coefficient inequalities exactly for i up to ``max_index``."""
    if isinstance(max_index, bool) or int(max_index) != max_index or max_index < 8:
        raise ValueError(f"max_index must be an integer >= 8, got {max_index!r}")
    max_index = int(max_index)
    results = []
    for claim_id, start, fn, strict, text in _CLAIMS:
        first = None
        best, best_at = None, None
        for i in range(start, max_index + 1):
            v = fn(i)
            if first is None and (v <= 0 if strict else v < 0):
                first = i
            if best is None or v < best:
                best, best_at = v, i
        results.append(
            ClaimResult(
                claim_id=claim_id,
                index_range=(start, max_index),
                holds=first is None,
                first_violation=first,
                min_margin=best,
                min_margin_at=best_at,
                checked=max_index - start + 1,
                description=text,
            )
        )
    return results


def _series_coefficient(a: float, i: int) -> Fraction:
    # phi_a(t) = e^-t/12 * sum_i c_i t^(i-1)
    if a == 0.0:
        return Fraction(-_claim_zero(i), factorial(i)) if i >= 4 else Fraction(0)
    return Fraction((i - 2) * _claim_half(i), factorial(i) * 2 ** (i - 3)) if i >= 5 else Fraction(0)


def series_partial_sum(a, t, terms: int) -> float:
    """Truncated power series of phi_a(t) for a in {0, 1/2} with ``terms`` terms."""
    a = shift_param(a)
    if a not in (0.0, 0.5):
        raise DomainError("series expansions are available for a = 0 and a = 1/2 only")
    t = positive_real(t)
    if isinstance(terms, bool) or int(terms) != terms or terms < 1:
        raise ValueError("terms must be a positive integer")
    start = 4 if a == 0.0 else 5
    parts = [float(_series_coefficient(a, i)) * t ** (i - 1) for i in range(start, start + int(terms))]
    return math.exp(-t) / 12.0 * fsum(parts)


def series_vs_direct(a, t, terms: int = 30) -> float:
    """Relative residual |phi_a(t) - series| / |phi_a(t)| for 0 < t <= 1."""
    t = positive_real(t)
    if t > 1.0:
        raise DomainError("series comparison is defined for 0 < t <= 1")
    if isinstance(terms, bool) or int(terms) != terms or terms < 30:
        raise ValueError("terms must be an integer >= 30")
    direct = phi_kernel(a, t)
    return abs(direct - series_partial_sum(a, t, terms)) / abs(direct)
