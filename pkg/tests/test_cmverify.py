import math

import numpy as np
import pytest

from monocert.cmverify import (
    DEAD_BAND,
    EVIDENCE_LABEL,
    ClaimResult,
    GridSpec,
    Verdict,
    certified_sign,
    classify_fa,
    kernel_sign_sweep,
    logcm_difference_check,
    remark_criterion_check,
    series_partial_sum,
    series_vs_direct,
    theoretical_verdict,
    threshold_crossing,
    threshold_curve_report,
    threshold_integral_residual,
    verify_series_claims,
)
from monocert.errors import DomainError, UnsupportedOrderError
from monocert.functions import phi_kernel, phi_threshold

GRID = GridSpec.log(0.05, 100, 200)
SMALL_GRID = GridSpec.log(0.05, 100, 40)


# -- GridSpec ----------------------------------------------------------------


def test_grid_constructors():
    g = GridSpec.log(1e-3, 100, 200)
    assert g.count == 200
    assert g.points[0] == 1e-3 and g.points[-1] == 100
    assert all(b > a for a, b in zip(g.points, g.points[1:]))
    lin = GridSpec.linear(1, 2, 3)
    assert lin.points == (1.0, 1.5, 2.0)
    assert GridSpec.parse("0.05:100:40:log") == SMALL_GRID
    assert GridSpec.parse("1:2:3:lin") == lin


@pytest.mark.parametrize(
    "points", [(), (1.0, 1.0), (2.0, 1.0), (1.0, float("nan")), (1.0, float("inf")), (0.0, 1.0)]
)
def test_grid_rejects(points):
    with pytest.raises(ValueError):
        GridSpec(points)


@pytest.mark.parametrize("token", ["1:2", "1:2:x:log", "2:1:5:log", "1:2:5:cubic", "-1:2:5:log", "1:2:0:lin"])
def test_grid_parse_rejects(token):
    with pytest.raises(ValueError):
        GridSpec.parse(token)


# -- dead band and verdict plumbing ----------------------------------------------


def test_certified_sign():
    assert certified_sign(1e-3, 1.0) == 1
    assert certified_sign(-1e-3, 1.0) == -1
    assert certified_sign(1e-12, 1.0) == 0
    assert certified_sign(1e-12, 1e-6) == 1
    assert certified_sign(float("nan"), 1.0) == 0


def test_theoretical_verdicts():
    assert theoretical_verdict(0) is Verdict.COMPLETELY_MONOTONIC
    for a in (0.5, 0.7, 5):
        assert theoretical_verdict(a) is Verdict.NEGATIVE_COMPLETELY_MONOTONIC
    for a in (0.1, 0.25, 0.49):
        assert theoretical_verdict(a) is Verdict.NEITHER


def test_claim_result_invariant():
    with pytest.raises(ValueError):
        ClaimResult("c", (1, 2), True, 1, 0.0)
    with pytest.raises(ValueError):
        ClaimResult("c", (1, 2), False, None, 0.0)


# -- classification ---------------------------------------------------------------


@pytest.mark.parametrize("a", [0.0, 0.1, 0.25, 0.4, 0.5, 0.7, 1.0, 5.0])
def test_classify_matches_theory(a):
    rep = classify_fa(a, GRID, max_order=6)
    assert rep.verdict == theoretical_verdict(a)
    assert not rep.inconclusive
    assert rep.passed
    assert rep.evidence == EVIDENCE_LABEL
    assert rep.orders == tuple(range(7))
    assert len(rep.entries) == 7 * GRID.count


def test_classify_report_invariants():
    cm = classify_fa(0, SMALL_GRID)
    assert all(m >= 0 for ms in cm.margins().values() for m in ms)
    assert not cm.violations
    neg = classify_fa(1, SMALL_GRID)
    assert all(m <= 0 for ms in neg.margins().values() for m in ms)
    assert not neg.negative_violations
    mixed = classify_fa(0.25, SMALL_GRID)
    # witnesses against both f and -f
    assert mixed.violations and mixed.negative_violations
    order, x, margin = mixed.worst_witness
    assert order in mixed.orders and x in SMALL_GRID.points


def test_classify_a_quarter_witnesses():
    # the sign change of f_{1/4} itself lies near x ~ 0.009, below the default grid
    rep = classify_fa(0.25, GridSpec.log(1e-4, 100, 200), max_order=0)
    assert rep.verdict is Verdict.NEITHER
    neg_x = [x for _, x, _ in rep.violations]
    pos_x = [x for _, x, _ in rep.negative_violations]
    # f_{1/4} is negative near 0 and positive for large x
    assert max(neg_x) < min(pos_x)


def test_classify_inconclusive_with_huge_dead_band():
    rep = classify_fa(0.0, SMALL_GRID, dead_band=1.0)
    assert rep.verdict is Verdict.INCONCLUSIVE
    assert not rep.passed


def test_classify_order_limits():
    with pytest.raises(UnsupportedOrderError):
        classify_fa(0, SMALL_GRID, max_order=8)
    with pytest.raises(UnsupportedOrderError):
        classify_fa(0, SMALL_GRID, max_order=-1)
    rep = classify_fa(0, GridSpec.log(0.5, 10, 5), max_order=7)
    assert rep.verdict is Verdict.COMPLETELY_MONOTONIC


# -- kernel signs and the threshold curve -------------------------------------------


T_GRID = GridSpec.log(1e-3, 100, 200)


def test_kernel_sign_examples():
    s0 = kernel_sign_sweep(0, T_GRID)
    assert s0.kind == "AllNegative" and s0.negative == 200 and s0.passed
    s1 = kernel_sign_sweep(0.5, T_GRID)
    assert s1.kind == "AllPositive" and s1.positive == 200 and s1.passed
    s3 = kernel_sign_sweep(0.3, T_GRID)
    assert s3.kind == "Mixed" and s3.passed
    lo, hi = s3.crossing
    assert hi - lo <= 1e-8
    assert phi_threshold(lo) > 0.3 > phi_threshold(hi)
    assert phi_kernel(0.3, lo) < 0 < phi_kernel(0.3, hi)


def test_threshold_crossing_domain():
    for a in (0.0, 0.5, 0.7):
        with pytest.raises(DomainError):
            threshold_crossing(a)


def test_threshold_curve_report():
    rep = threshold_curve_report(T_GRID)
    assert rep.passed
    assert rep.strictly_decreasing and rep.first_violation is None
    assert abs(rep.values[0] - 0.49998) <= 1e-4
    assert rep.large_end["ok"]
    assert all(abs(r) <= 1e-8 for r in rep.integral_residuals.values())


def test_threshold_integral_residuals():
    for t in (0.5, 2.0, 10.0):
        assert abs(threshold_integral_residual(t)) <= 1e-8


def test_kernel_threshold_duality():
    rng = np.random.default_rng(11)
    a = rng.uniform(0, 1, 1000)
    t = np.exp(rng.uniform(math.log(1e-3), math.log(100), 1000))
    gap = a - phi_threshold(t)
    sig = np.abs(gap) > 1e-10
    assert np.all(np.sign(phi_kernel_vec(a, t))[sig] == np.sign(gap)[sig])


def phi_kernel_vec(a, t):
    return np.array([phi_kernel(ai, ti) for ai, ti in zip(a, t)])


# -- difference criteria -------------------------------------------------------------


def test_remark_criterion_orientations():
    r0 = remark_criterion_check(0, grid=SMALL_GRID)
    assert r0.evidence == EVIDENCE_LABEL
    assert not r0.details["forward_chain"]
    assert r0.details["reversed_chain"]
    assert r0.details["limits_ok"]
    assert r0.verdict is Verdict.COMPLETELY_MONOTONIC
    r_half = remark_criterion_check(0.5, grid=SMALL_GRID)
    assert r_half.details["forward_chain"]
    assert r_half.verdict is Verdict.NEGATIVE_COMPLETELY_MONOTONIC
    r_step2 = remark_criterion_check(0, alpha_step=2, grid=SMALL_GRID)
    assert r_step2.verdict == r0.verdict
    assert r_step2.details["forward_chain"] == r0.details["forward_chain"]
    assert r_step2.details["reversed_chain"] == r0.details["reversed_chain"]


def test_remark_criterion_rejects_bad_step():
    with pytest.raises(ValueError):
        remark_criterion_check(0, alpha_step=0, grid=SMALL_GRID)


def test_logcm_examples():
    assert logcm_difference_check(0, 0, 1, grid=SMALL_GRID).verdict is Verdict.COMPLETELY_MONOTONIC
    assert logcm_difference_check(1, 0.2, 0.7, grid=SMALL_GRID).verdict is Verdict.NEGATIVE_COMPLETELY_MONOTONIC
    assert logcm_difference_check(0.25, 0, 1, grid=SMALL_GRID).verdict is Verdict.NEITHER
    with pytest.raises(ValueError):
        logcm_difference_check(0, 1, 0.5, grid=SMALL_GRID)


def test_logcm_drops_points_outside_domain():
    rep = logcm_difference_check(0, -0.5, 1, grid=GridSpec.log(0.1, 10, 20))
    assert all(x - 0.5 > 0 for _, x, _ in (e.as_tuple() for e in rep.entries))
    assert rep.verdict is Verdict.COMPLETELY_MONOTONIC


@pytest.mark.parametrize("a", [0.0, 0.25, 0.5, 1.0])
def test_verdicts_mutually_consistent(a):
    direct = classify_fa(a, SMALL_GRID)
    remark = remark_criterion_check(a, grid=SMALL_GRID)
    if a in (0.0, 0.5, 1.0):
        assert remark.verdict == direct.verdict
    kernel = kernel_sign_sweep(a, T_GRID)
    expected_kind = {Verdict.COMPLETELY_MONOTONIC: "AllNegative", Verdict.NEGATIVE_COMPLETELY_MONOTONIC: "AllPositive", Verdict.NEITHER: "Mixed"}
    assert kernel.kind == expected_kind[direct.verdict]


# -- series claims ------------------------------------------------------------------


def test_series_claims():
    claims = {c.claim_id: c for c in verify_series_claims(1000)}
    assert len(claims) == 3
    for c in claims.values():
        assert c.holds and c.first_violation is None and c.min_margin > 0
        assert c.index_range[1] == 1000
    assert claims["phi_half_coefficient"].min_margin == 4
    assert claims["phi_zero_coefficient"].min_margin == 12
    assert claims["phi2_derivative_coefficient"].min_margin == 56


def test_series_claims_need_range():
    with pytest.raises(ValueError):
        verify_series_claims(5)


@pytest.mark.parametrize("a,terms", [(0.0, 30), (0.5, 40)])
@pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
def test_series_vs_direct(a, t, terms):
    assert series_vs_direct(a, t, terms) <= 1e-8


def test_series_leading_term_dominates():
    # phi_0(t) ~ -(1/12)(12/4!) t^3 as t -> 0
    t = 1e-4
    ratio = phi_kernel(0.0, t) / (-(t**3) / 24)
    assert abs(ratio - 1) <= 1e-3
    assert abs(series_partial_sum(0.0, t, 30) - phi_kernel(0.0, t)) <= 1e-14 * abs(phi_kernel(0.0, t))


def test_series_domain():
    with pytest.raises(ValueError):
        series_vs_direct(0.0, 2.0)
    with pytest.raises(ValueError):
        series_vs_direct(0.0, 0.5, terms=10)
    with pytest.raises(ValueError):
        series_vs_direct(0.3, 0.5)


def test_dead_band_constant():
    assert DEAD_BAND == 1e-11
