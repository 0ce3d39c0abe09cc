import csv
import inspect
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from monocert import bounds, cli, cmverify, functions, special
from monocert.cmverify import GridSpec, classify_fa
from monocert.report import (
    CSV_HEADER,
    SCHEMA_VERSION,
    ReportDocument,
    Result,
    emit_csv,
    emit_json,
    from_cm_report,
    from_counterexample,
    schema,
)
from monocert.bounds import gamma_bound_counterexample

# argument validators and verdict plumbing, not operations in their own right
NON_OPERATIONS = {"positive_real", "deriv_order", "shift_param", "certified_sign", "theoretical_verdict"}

FAST_SWEEP = ["sweep", "--grid", "0.05:100:10:log"]


def run_cli(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# -- dispatch coverage ------------------------------------------------------------


def test_every_operation_reachable():
    for module in (special, functions, cmverify, bounds):
        for name in module.__all__:
            obj = getattr(module, name)
            if not inspect.isfunction(obj) or name in NON_OPERATIONS:
                continue
            target = cli.INDIRECT_OPERATIONS.get(name, name)
            assert target in cli.OPERATIONS, name


@pytest.mark.parametrize("name", sorted(cli.OPERATIONS))
def test_operation_examples_run_and_validate(name, capsys):
    argv = cli.OPERATIONS[name]
    if "--format" not in argv:
        argv = argv + ["--format", "json"]
    code, out, err = run_cli(argv, capsys)
    expected = 1 if name == "gamma_bound_counterexample" else 0
    assert code == expected, err
    if "json" in argv:
        jsonschema.validate(json.loads(out), schema())


# -- exit-status contract -------------------------------------------------------------


def test_exit_ok_cm(capsys):
    code, out, _ = run_cli(["verify-cm", "--a", "0", "--grid", "0.05:100:200:log", "--orders", "0..6", "--format", "json"], capsys)
    assert code == cli.EXIT_OK
    doc = json.loads(out)
    assert doc["results"][0]["data"]["verdict"] == "CompletelyMonotonic"


def test_eval_example(capsys):
    code, out, _ = run_cli(["eval", "--fn", "f", "--a", "0.5", "--x", "1", "--format", "json"], capsys)
    assert code == 0
    value = json.loads(out)["results"][0]["data"]["value"]
    assert round(value, 10) == -0.0031612834


def test_exit_violation_counterexample(capsys):
    code, out, _ = run_cli(["counterexample", "--side", "lower", "--a", "0.4", "--format", "json"], capsys)
    assert code == cli.EXIT_VIOLATION
    data = json.loads(out)["results"][0]["data"]
    assert data["witness"]["x_witness"] > 0 and data["witness"]["margin"] < 0


def test_exit_violation_off_threshold_bound(capsys):
    # beta = 1/4 < 1/2: the lower Gamma bound fails for large x
    code, _, _ = run_cli(["bounds", "--kind", "gamma", "--x", "100", "--beta", "0.25"], capsys)
    assert code == cli.EXIT_VIOLATION


def test_exit_inconclusive_dead_band(capsys):
    code, _, _ = run_cli(["verify-cm", "--a", "0", "--grid", "0.05:100:5:log", "--dead-band", "1"], capsys)
    assert code == cli.EXIT_INCONCLUSIVE


def test_exit_inconclusive_non_convergence(capsys):
    code, out, err = run_cli(["eval", "--fn", "theta-quad", "--x", "1", "--truncation-T", "2"], capsys)
    assert code == cli.EXIT_INCONCLUSIVE
    assert out == ""
    assert '"truncation_T": 2.0' in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["eval", "--fn", "f", "--a", "0", "--x", "-1"],
        ["eval", "--fn", "f", "--a", "-1", "--x", "1"],
        ["eval", "--fn", "nope", "--x", "1"],
        ["verify-cm", "--a", "0", "--grid", "100:0.05:10:log"],
        ["verify-cm", "--a", "0", "--grid", "1:2:1:log"],
        ["verify-cm", "--a", "0", "--orders", "0..9"],
        ["eval", "--fn", "theta-quad", "--x", "1", "--tolerance", "-1"],
        ["kernel", "--fn", "phi", "--t", "0"],
    ],
)
def test_exit_usage(argv, capsys):
    code, _, err = run_cli(argv, capsys)
    assert code == cli.EXIT_USAGE
    assert err


def test_invalid_thread_count(monkeypatch, capsys):
    monkeypatch.setenv("MONOCERT_THREADS", "zero")
    code, _, err = run_cli(["eval", "--fn", "f", "--a", "0", "--x", "1"], capsys)
    assert code == cli.EXIT_USAGE
    assert "MONOCERT_THREADS" in err


def test_output_path(tmp_path, capsys):
    path = tmp_path / "r.csv"
    code, out, _ = run_cli(["eval", "--fn", "f", "--a", "0", "--x", "1", "--format", "csv", "--output", str(path)], capsys)
    assert code == 0 and out == ""
    assert path.read_text().startswith(",".join(CSV_HEADER) + "\n")


def test_output_path_unwritable(tmp_path, capsys):
    path = tmp_path / "missing" / "r.csv"
    code, _, err = run_cli(["eval", "--fn", "f", "--a", "0", "--x", "1", "--output", str(path)], capsys)
    assert code == cli.EXIT_USAGE
    assert str(path) in err


def test_subprocess_end_to_end():
    proc = subprocess.run(
        [sys.executable, "-m", "monocert.cli", "counterexample", "--side", "lower", "--a", "0.45", "--format", "csv"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 1
    assert proc.stdout.splitlines()[0] == ",".join(CSV_HEADER)


# -- determinism ------------------------------------------------------------------------


SUBCOMMAND_RUNS = [
    ["eval", "--fn", "theta-quad", "--x", "2"],
    ["kernel", "--check", "threshold"],
    ["verify-cm", "--a", "0.25", "--grid", "0.05:100:30:log"],
    ["verify-claims"],
    ["bounds", "--kind", "lemma", "--grid", "0.01:100:30:log"],
    ["counterexample", "--side", "upper", "--a", "0.05"],
    FAST_SWEEP,
]


@pytest.mark.parametrize("argv", SUBCOMMAND_RUNS, ids=lambda a: a[0])
@pytest.mark.parametrize("fmt", ["csv", "json", "table"])
def test_byte_identical_reruns(argv, fmt, capsys):
    first = run_cli(argv + ["--format", fmt], capsys)
    second = run_cli(argv + ["--format", fmt], capsys)
    assert first == second


@pytest.mark.parametrize("argv", [FAST_SWEEP, ["bounds", "--kind", "lemma"]], ids=lambda a: a[0])
def test_thread_count_does_not_change_output(argv, monkeypatch, capsys):
    monkeypatch.setenv("MONOCERT_THREADS", "1")
    serial = run_cli(argv + ["--format", "csv"], capsys)
    monkeypatch.setenv("MONOCERT_THREADS", "4")
    threaded = run_cli(argv + ["--format", "csv"], capsys)
    assert serial == threaded


def test_timing_only_on_request(capsys):
    _, out, _ = run_cli(["eval", "--fn", "f", "--a", "0", "--x", "1", "--format", "json"], capsys)
    assert json.loads(out)["timing"] is None
    _, out, _ = run_cli(["eval", "--fn", "f", "--a", "0", "--x", "1", "--format", "json", "--timing"], capsys)
    assert json.loads(out)["timing"] >= 0


# -- CSV / JSON contracts ----------------------------------------------------------------


def _cm_doc(a=0.0, points=2, max_order=2):
    rep = classify_fa(a, GridSpec.log(0.5, 5, points), max_order=max_order)
    return ReportDocument({"subcommand": "verify-cm", "argv": []}, [from_cm_report(rep)])


def test_csv_cardinality():
    text = emit_csv(_cm_doc())
    assert "\r" not in text
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER
    data = [r for r in rows[1:] if r[1] != ""]
    assert len(data) == 6
    summary = rows[-1]
    assert summary[1:5] == ["", "", "", ""] and summary[5] == "pass"


def test_csv_row_order():
    rows = list(csv.reader(io.StringIO(emit_csv(_cm_doc(points=4, max_order=3)))))[1:-1]
    keys = [(int(r[1]), float(r[2])) for r in rows]
    assert keys == sorted(keys)


def test_csv_round_trip():
    rows = list(csv.reader(io.StringIO(emit_csv(_cm_doc(a=0.25, points=7, max_order=6)))))[1:-1]
    for series, order, x, value, margin, verdict in rows:
        n, v, m = int(order), float(value), float(margin)
        assert abs((-1) ** n * v - m) <= 1e-15 * max(1.0, abs(m))
        assert verdict in ("positive", "negative", "inconclusive")
        # 17 significant digits round-trip the binary64 values exactly
        assert float(repr(v)) == v and "%.17g" % v == value


def test_counterexample_status_rules():
    found = gamma_bound_counterexample("lower", 0.45)
    none = gamma_bound_counterexample("lower", 0.5)
    assert from_counterexample(found).status == "fail"
    assert from_counterexample(none).status == "pass"
    assert from_counterexample(found, expect_found=True).status == "pass"
    assert from_counterexample(none, expect_found=True).status == "fail"


def test_json_document():
    doc = _cm_doc()
    parsed = json.loads(emit_json(doc))
    assert parsed["schema_version"] == SCHEMA_VERSION == "1.0"
    jsonschema.validate(parsed, schema())
    assert parsed["summary"] == {"pass": 1, "fail": 0, "inconclusive": 0, "total": 1}


def test_json_non_finite_values_are_strings():
    doc = ReportDocument(
        {"subcommand": "eval", "argv": []},
        [Result("scalar", "w", "pass", {"value": float("inf"), "other": float("nan")})],
    )
    parsed = json.loads(emit_json(doc))
    assert parsed["results"][0]["data"] == {"value": "inf", "other": "nan"}


def test_exit_status_rules():
    def doc(*statuses):
        return ReportDocument({}, [Result("scalar", "s", st, {}) for st in statuses])

    assert doc("pass", "pass").exit_status == 0
    assert doc("pass", "fail", "inconclusive").exit_status == 1
    assert doc("pass", "inconclusive").exit_status == 2
    assert doc().exit_status == 2


def test_sweep_all_pass(capsys):
    code, out, _ = run_cli(FAST_SWEEP + ["--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["summary"]["fail"] == 0 and doc["summary"]["total"] > 50
