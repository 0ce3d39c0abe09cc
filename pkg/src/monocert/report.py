"""Report document model and its CSV / JSON / table serializations.

A report is a list of *results*.  Each result has a kind, a series name, a
status (pass / fail / inconclusive), a JSON payload and CSV rows.  Output is
byte-for-byte deterministic: fixed ordering, floats printed with ``%.17g``
in CSV and as shortest round-trip reprs in JSON, and no timing unless asked
for.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .bounds import BoundPair, CounterexampleSearch
from .cmverify import ClaimResult, CMReport, KernelSignSummary, ThresholdReport, Verdict
from .quadrature import QuadratureResult

__all__ = [
    "SCHEMA_VERSION",
    "CSV_HEADER",
    "PASS",
    "FAIL",
    "INCONCLUSIVE",
    "Result",
    "ReportDocument",
    "from_cm_report",
    "from_claim",
    "from_bound_pair",
    "from_counterexample",
    "from_kernel_sign",
    "from_threshold",
    "from_scalar",
    "from_quadrature",
    "from_samples",
    "emit_csv",
    "emit_json",
    "emit_table",
    "schema",
]

SCHEMA_VERSION = "1.0"
CSV_HEADER = ("series", "order", "x", "value", "margin", "verdict")
PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

Row = Tuple[str, Optional[int], Optional[float], Optional[float], Optional[float], str]


@dataclass
class Result:
    kind: str
    series: str
    status: str
    data: Dict[str, Any]
    rows: List[Row] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "series": self.series, "status": self.status, "data": self.data}


@dataclass
class ReportDocument:
    command: Dict[str, Any]
    results: List[Result]
    timing: Optional[float] = None
    schema_version: str = SCHEMA_VERSION

    @property
    def summary(self) -> Dict[str, int]:
        counts = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
        for r in self.results:
            counts[r.status] += 1
        counts["total"] = len(self.results)
        return counts

    @property
    def exit_status(self) -> int:
        """0 all pass, 1 any failure, 2 inconclusive (and no failure)."""
        s = self.summary
        if s[FAIL]:
            return 1
        if s[INCONCLUSIVE] or not self.results:
            return 2
        return 0

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "results": [r.to_dict() for r in self.results],
            "summary": self.summary,
            "timing": self.timing,
        }


# --------------------------------------------------------------------------
# JSON-safe conversion


def _clean(obj):
    """Recursively convert to JSON-safe builtins; non-finite floats become strings."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return _clean({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    if hasattr(obj, "tolist"):
        return _clean(obj.tolist())
    return _clean(float(obj))


# --------------------------------------------------------------------------
# converters


def _status(ok: bool, inconclusive: bool = False) -> str:
    if inconclusive:
        return INCONCLUSIVE
    return PASS if ok else FAIL


_SIGN_WORD = {1: "positive", -1: "negative", 0: "inconclusive"}


def from_cm_report(report: CMReport) -> Result:
    if report.verdict == Verdict.INCONCLUSIVE:
        status = INCONCLUSIVE
    else:
        status = _status(report.passed)
    rows: List[Row] = [
        (report.series, e.order, e.x, e.value, e.margin, _SIGN_WORD[e.sign]) for e in report.entries
    ]
    data = {
        "verdict": report.verdict.value,
        "expected": None if report.expected is None else report.expected.value,
        "orders": list(report.orders),
        "dead_band": report.dead_band,
        "evidence": report.evidence,
        "worst_witness": report.worst_witness,
        "violations": len(report.violations),
        "negative_violations": len(report.negative_violations),
        "inconclusive": len(report.inconclusive),
        "first_violation": report.violations[0] if report.violations else None,
        "first_negative_violation": report.negative_violations[0] if report.negative_violations else None,
        "margins": [[e.order, e.x, e.margin] for e in report.entries],
        "details": report.details,
    }
    return Result("cm_report", report.series, status, _clean(data), rows)


def from_claim(claim: ClaimResult) -> Result:
    status = _status(claim.holds, claim.inconclusive > 0 and claim.holds)
    row: Row = (claim.claim_id, None, _num(claim.min_margin_at), None, _num(claim.min_margin), status)
    return Result("claim", claim.claim_id, status, _clean(claim), [row])


def _num(v):
    if v is None:
        return None
    try:
        return float(v)
    except OverflowError:
        return math.inf if v > 0 else -math.inf


def from_bound_pair(series: str, bp: BoundPair) -> Result:
    lo_word = _SIGN_WORD[bp.lower_sign]
    hi_word = _SIGN_WORD[bp.upper_sign]
    inconclusive = 0 in (bp.lower_sign, bp.upper_sign) and -1 not in (bp.lower_sign, bp.upper_sign)
    status = _status(bp.contains, inconclusive)
    x = bp.params.get("x")
    rows: List[Row] = [
        (f"{series}:lower", None, x, bp.lower, bp.lower_margin, lo_word),
        (f"{series}:target", None, x, bp.target, None, ""),
        (f"{series}:upper", None, x, bp.upper, bp.upper_margin, hi_word),
    ]
    data = {
        "params": bp.params,
        "lower": bp.lower,
        "upper": bp.upper,
        "target": bp.target,
        "log_lower": bp.log_lower,
        "log_upper": bp.log_upper,
        "log_target": bp.log_target,
        "lower_margin": bp.lower_margin,
        "upper_margin": bp.upper_margin,
        "relative_width": bp.relative_width,
        "contains": bp.contains,
    }
    return Result("bound_pair", series, status, _clean(data), rows)


def from_counterexample(search: CounterexampleSearch, expect_found: Optional[bool] = None) -> Result:
    """Counterexample search outcome.

    Without an expectation, a witness is a violation of the bound: status
    fail.  With ``expect_found`` (a sharpness check), the status is pass
    exactly when the outcome matches the expectation.
    """
    series = f"counterexample:{search.side}(a={search.a!r})"
    if search.found:
        w = search.witness
        rows: List[Row] = [(series, None, w.x_witness, None, w.margin, "violation")]
    else:
        rows = [(series, None, None, None, None, "exhausted")]
    if expect_found is None:
        status = FAIL if search.found else PASS
    else:
        status = _status(search.found == expect_found)
    data = dataclasses.asdict(search)
    data["found"] = search.found
    data["expect_found"] = expect_found
    return Result("counterexample", series, status, _clean(data), rows)


def from_kernel_sign(summary: KernelSignSummary) -> Result:
    series = f"kernel_sign(a={summary.a!r})"
    x = summary.crossing[0] if summary.crossing else None
    status = _status(summary.grid_consistent)
    rows: List[Row] = [(series, None, x, None, None, summary.kind)]
    return Result("kernel_sign", series, status, _clean(summary), rows)


def from_threshold(rep: ThresholdReport) -> Result:
    series = "threshold_curve"
    rows: List[Row] = [(series, None, t, v, None, "") for t, v in zip(rep.points, rep.values)]
    data = {
        "strictly_decreasing": rep.strictly_decreasing,
        "first_violation": rep.first_violation,
        "in_range": rep.in_range,
        "small_end": rep.small_end,
        "large_end": rep.large_end,
        "integral_residuals": [[t, r] for t, r in rep.integral_residuals.items()],
        "integral_tolerance": rep.integral_tolerance,
        "count": len(rep.points),
    }
    return Result("threshold", series, _status(rep.passed), _clean(data), rows)


def from_scalar(series: str, params: Dict[str, Any], value: float, ok: bool = True, **extra) -> Result:
    x = params.get("x", params.get("t"))
    order = params.get("order")
    status = _status(ok)
    data = {"params": params, "value": value, **extra}
    return Result("scalar", series, status, _clean(data), [(series, order, x, value, None, status)])


def from_samples(series: str, params: Dict[str, Any], points: Sequence[float], values: Sequence[float]) -> Result:
    """Function values on a grid; one CSV row per point."""
    pts = [float(p) for p in points]
    vals = [float(v) for v in values]
    ok = all(math.isfinite(v) for v in vals)
    status = _status(ok)
    rows: List[Row] = [(series, params.get("order"), p, v, None, "") for p, v in zip(pts, vals)]
    data = {"params": params, "points": pts, "values": vals}
    return Result("samples", series, status, _clean(data), rows)


def from_quadrature(series: str, params: Dict[str, Any], res: QuadratureResult) -> Result:
    data = {
        "params": params,
        "value": res.value,
        "tail_bound": res.tail_bound,
        "truncation_T": res.truncation_T,
        "panels": res.panels,
        "converged": res.converged,
        "config": res.config.to_dict(),
    }
    x = params.get("x")
    status = _status(res.converged)
    return Result("quadrature", series, status, _clean(data), [(series, None, x, res.value, None, status)])


# --------------------------------------------------------------------------
# emitters


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    return str(v)


def csv_rows(doc: ReportDocument) -> List[List[str]]:
    """Data rows in result order; within a result grouped by series name
    (first appearance), then by order, then ascending x.  Each result ends
    with a summary row carrying only its series name and status.
    """

    def key(row: Row):
        order = -1 if row[1] is None else row[1]
        x = -math.inf if row[2] is None else row[2]
        return (order, x)

    out: List[List[str]] = []
    for res in doc.results:
        for name in dict.fromkeys(r[0] for r in res.rows):
            for row in sorted((r for r in res.rows if r[0] == name), key=key):
                out.append([_fmt(v) for v in row])
        out.append([res.series, "", "", "", "", res.status])
    return out


def emit_csv(doc: ReportDocument) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(csv_rows(doc))
    return buf.getvalue()


def emit_json(doc: ReportDocument) -> str:
    return json.dumps(_clean(doc.to_dict()), indent=2, allow_nan=False) + "\n"


def emit_table(doc: ReportDocument) -> str:
    lines = [f"monocert report (schema {doc.schema_version})"]
    width = max([len(r.series) for r in doc.results] + [6])
    for r in doc.results:
        summary = _table_summary(r)
        lines.append(f"  {r.series:<{width}}  {r.status:<12}  {summary}")
    s = doc.summary
    lines.append(
        f"summary: {s[PASS]} pass, {s[FAIL]} fail, {s[INCONCLUSIVE]} inconclusive, {s['total']} total"
    )
    if doc.timing is not None:
        lines.append(f"timing: {doc.timing:.3f} s")
    return "\n".join(lines) + "\n"


def _table_summary(r: Result) -> str:
    d = r.data
    if r.kind == "cm_report":
        return f"verdict={d['verdict']} expected={d['expected']} inconclusive={d['inconclusive']}"
    if r.kind == "samples":
        return f"{len(d['points'])} points"
    if r.kind in ("scalar", "quadrature"):
        return f"value={_fmt(d['value'])}"
    if r.kind == "bound_pair":
        return f"lower={_fmt(d['lower'])} target={_fmt(d['target'])} upper={_fmt(d['upper'])}"
    if r.kind == "claim":
        return f"min_margin={_fmt(d['min_margin'])} first_violation={d['first_violation']}"
    if r.kind == "counterexample":
        w = d["witness"]
        if w is None:
            lo, hi = d["searched"]
            return f"none found in [{_fmt(lo)}, {_fmt(hi)}]"
        return f"x={_fmt(w['x_witness'])} margin={_fmt(w['margin'])}"
    if r.kind == "kernel_sign":
        return f"{d['kind']} crossing={d['crossing']}"
    if r.kind == "threshold":
        return f"decreasing={d['strictly_decreasing']} in_range={d['in_range']}"
    return ""


def schema() -> dict:
    """The JSON schema of the report document (shipped as report_schema.json)."""
    from importlib.resources import files

    return json.loads(files("monocert").joinpath("report_schema.json").read_text(encoding="utf-8"))
