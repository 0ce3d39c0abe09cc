"""``monocert`` command-line interface.

Exit status: 0 all checks pass, 1 violations found, 2 inconclusive or
numerical non-convergence, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Callable, Dict, List, Optional, Sequence

from . import bounds, cmverify, functions, special
from .cmverify import GridSpec
from .errors import ConvergenceError, MonocertError
from .parallel import thread_count
from .quadrature import QuadratureConfig
from .report import (
    ReportDocument,
    Result,
    emit_csv,
    emit_json,
    emit_table,
    from_bound_pair,
    from_claim,
    from_cm_report,
    from_counterexample,
    from_kernel_sign,
    from_quadrature,
    from_samples,
    from_scalar,
    from_threshold,
)

__all__ = ["main", "run", "build_parser", "OPERATIONS", "INDIRECT_OPERATIONS", "EXIT_OK", "EXIT_VIOLATION", "EXIT_INCONCLUSIVE", "EXIT_USAGE"]

EXIT_OK, EXIT_VIOLATION, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64

# Tolerances for pass/fail of scalar identity checks.
REPRESENTATION_TOL = 1e-10
SERIES_TOL = 1e-8
LAPLACE_TOL = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# argument types


def _grid(token: str) -> GridSpec:
    try:
        return GridSpec.parse(token)
    except (ValueError, MonocertError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _orders(token: str) -> List[int]:
    try:
        if ".." in token:
            lo, hi = token.split("..", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(token)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"orders must look like N or LO..HI, got {token!r}") from exc
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad order range {token!r}")
    return list(range(lo, hi + 1))


def _positive(token: str) -> float:
    try:
        v = float(token)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number, got {token!r}") from exc
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {token!r}")
    return v


def _nonneg(token: str) -> float:
    try:
        v = float(token)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number, got {token!r}") from exc
    if not (math.isfinite(v) and v >= 0):
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {token!r}")
    return v


def _real(token: str) -> float:
    try:
        v = float(token)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number, got {token!r}") from exc
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {token!r}")
    return v


def _floats(token: str) -> List[float]:
    return [_positive(p) for p in token.split(",") if p]


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall time (breaks byte-determinism)")

    quad = _Parser(add_help=False)
    quad.add_argument("--truncation-T", type=_positive, default=None, dest="truncation_T")
    quad.add_argument("--nodes", type=int, default=20)
    quad.add_argument("--tolerance", type=_positive, default=1e-12)
    quad.add_argument("--series-switch", type=_positive, default=functions.SERIES_SWITCH, dest="series_switch")

    parser = _Parser(prog="monocert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common, quad], help="evaluate a special or constructed function")
    p.add_argument("--fn", required=True, choices=sorted(EVAL_FUNCTIONS))
    p.add_argument("--a", type=_nonneg, default=0.0)
    p.add_argument("--x", type=_positive, required=True)
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--route", choices=("exp_kernel", "arctan_kernel"), default="exp_kernel")

    p = sub.add_parser("kernel", parents=[common, quad], help="Laplace kernels and the threshold curve")
    p.add_argument("--fn", choices=sorted(KERNEL_FUNCTIONS), default="phi")
    p.add_argument("--a", type=_nonneg, default=0.0)
    where = p.add_mutually_exclusive_group()
    where.add_argument("--t", type=_positive)
    where.add_argument("--grid", type=_grid)
    p.add_argument("--check", choices=("sign", "threshold", "series"))
    p.add_argument("--terms", type=int, default=30)

    p = sub.add_parser("verify-cm", parents=[common], help="complete-monotonicity sign sweeps")
    p.add_argument("--a", type=_nonneg, nargs="+", required=True)
    p.add_argument("--grid", type=_grid, default=None)
    p.add_argument("--orders", type=_orders, default=list(range(7)))
    p.add_argument("--dead-band", type=_positive, default=cmverify.DEAD_BAND, dest="dead_band")
    p.add_argument("--criterion", choices=("direct", "difference", "logcm"), default="direct")
    p.add_argument("--step", type=_positive, default=1.0, help="shift for --criterion difference")
    p.add_argument("--s", type=_real, default=0.0, help="first shift for --criterion logcm")
    p.add_argument("--t", type=_real, default=1.0, help="second shift for --criterion logcm")

    p = sub.add_parser("verify-claims", parents=[common], help="integer coefficient claims and kernel series")
    p.add_argument("--max-index", type=int, default=1000, dest="max_index")
    p.add_argument("--series-t", type=_floats, default=[0.1, 0.5, 1.0], dest="series_t")
    p.add_argument("--terms", type=int, default=40)

    p = sub.add_parser("bounds", parents=[common], help="gamma and gamma-ratio enclosures, lemma checks")
    p.add_argument("--kind", choices=("gamma", "ratio", "lemma", "limits", "width"), default="gamma")
    where = p.add_mutually_exclusive_group()
    where.add_argument("--x", type=_real)
    where.add_argument("--grid", type=_grid)
    p.add_argument("--alpha", type=_nonneg, default=None)
    p.add_argument("--beta", type=_nonneg, default=None)
    p.add_argument("--s", type=_real, default=0.0)
    p.add_argument("--t", type=_real, default=1.0)
    p.add_argument("--orders", type=_orders, default=list(range(1, 7)))

    p = sub.add_parser("counterexample", parents=[common], help="search for a failure of an off-threshold bound")
    p.add_argument("--side", choices=("lower", "upper"), required=True)
    p.add_argument("--a", type=_nonneg, required=True)
    p.add_argument("--grid", type=_grid, default=None, help="search range (only min and max are used)")
    p.add_argument("--factor", type=_positive, default=2.0)

    p = sub.add_parser("sweep", parents=[common, quad], help="run the full verification battery")
    p.add_argument("--grid", type=_grid, default=None, help="x grid for the CM sweeps")
    p.add_argument("--orders", type=_orders, default=list(range(7)))
    return parser


# --------------------------------------------------------------------------
# handlers


def _cfg(args) -> QuadratureConfig:
    return QuadratureConfig(
        truncation_T=args.truncation_T,
        nodes=args.nodes,
        series_switch=args.series_switch,
        tolerance=args.tolerance,
    )


def _max_order(orders: Sequence[int]) -> int:
    if orders[0] != 0:
        raise UsageError("CM sweeps start at order 0; use --orders 0..N")
    return orders[-1]


EVAL_FUNCTIONS: Dict[str, Callable] = {
    "lngamma": lambda args: special.ln_gamma(args.x),
    "digamma": lambda args: special.digamma(args.x),
    "trigamma": lambda args: special.trigamma(args.x),
    "polygamma": lambda args: special.polygamma(args.order, args.x),
    "theta": lambda args: special.stirling_remainder(args.x),
    "F": lambda args: functions.F_a(args.a, args.x),
    "f": lambda args: functions.f_a(args.a, args.x),
    "f-direct": lambda args: functions.f_a_direct(args.a, args.x),
    "g": lambda args: functions.g_a(args.a, args.x),
    "f-deriv": lambda args: functions.f_a_derivative(args.a, args.x, args.order),
    "difference": lambda args: functions.difference_closed_form(args.a, args.x),
    "difference-deriv": lambda args: functions.difference_derivative_closed_form(args.a, args.x),
    # the three below are handled specially (quadrature results / identity checks)
    "theta-quad": None,
    "representation": None,
    "laplace": None,
}


def _cmd_eval(args) -> List[Result]:
    params = {"fn": args.fn, "a": args.a, "x": args.x}
    if args.fn in ("polygamma", "f-deriv"):
        params["order"] = args.order
    if args.fn == "theta-quad":
        params["route"] = args.route
        return [from_quadrature("binet_theta", params, functions.binet_theta(args.x, _cfg(args), args.route))]
    if args.fn == "representation":
        r = functions.theta_representation_check(args.a, args.x, _cfg(args))
        return [from_scalar("theta_representation", params, r, abs(r) <= REPRESENTATION_TOL, tolerance=REPRESENTATION_TOL)]
    if args.fn == "laplace":
        q = functions.laplace_difference_derivative(args.a, args.x, _cfg(args))
        closed = functions.difference_derivative_closed_form(args.a, args.x)
        res = abs(q.value - closed)
        return [
            from_scalar(
                "laplace_difference_derivative", params, q.value, res <= LAPLACE_TOL and q.converged,
                closed_form=closed, residual=res, tail_bound=q.tail_bound, config=q.config.to_dict(),
            )
        ]
    value = EVAL_FUNCTIONS[args.fn](args)
    return [from_scalar(args.fn, params, value, math.isfinite(value))]


KERNEL_FUNCTIONS: Dict[str, Callable] = {
    "phi": lambda a, t, sw: functions.phi_kernel(a, t, sw),
    "phi1": lambda a, t, sw: functions.phi1(t, sw),
    "threshold": lambda a, t, sw: functions.phi_threshold(t, sw),
    "threshold-binet": lambda a, t, sw: functions.phi_threshold_binet_form(t, sw),
    "phi2": lambda a, t, sw: functions.phi2(t, sw),
    "bracket": lambda a, t, sw: functions.binet_bracket(t, sw),
}


def _cmd_kernel(args) -> List[Result]:
    if args.check == "sign":
        grid = args.grid or GridSpec.log(1e-3, 100.0, 200)
        return [from_kernel_sign(cmverify.kernel_sign_sweep(args.a, grid))]
    if args.check == "threshold":
        grid = args.grid or GridSpec.log(1e-3, 100.0, 200)
        return [from_threshold(cmverify.threshold_curve_report(grid, cfg=_cfg(args)))]
    if args.check == "series":
        ts = [args.t] if args.t is not None else [0.1, 0.5, 1.0]
        out = []
        for t in ts:
            r = cmverify.series_vs_direct(args.a, t, args.terms)
            params = {"a": args.a, "t": t, "terms": args.terms}
            out.append(from_scalar(f"series_vs_direct(a={args.a!r})", params, r, r <= SERIES_TOL, tolerance=SERIES_TOL))
        return out
    fn = KERNEL_FUNCTIONS[args.fn]
    params = {"fn": args.fn, "a": args.a}
    if args.grid is not None:
        vals = fn(args.a, list(args.grid.points), args.series_switch)
        return [from_samples(args.fn, {**params, "grid": args.grid.to_dict()}, args.grid.points, vals)]
    if args.t is None:
        raise UsageError("kernel evaluation needs --t or --grid")
    v = float(fn(args.a, args.t, args.series_switch))
    return [from_scalar(args.fn, {**params, "t": args.t}, v, math.isfinite(v))]


def _cmd_verify_cm(args) -> List[Result]:
    max_order = _max_order(args.orders)
    out = []
    for a in args.a:
        if args.criterion == "direct":
            grid = args.grid or GridSpec.log(0.05, 100.0, 200)
            rep = cmverify.classify_fa(a, grid, max_order, args.dead_band)
        elif args.criterion == "difference":
            grid = args.grid or GridSpec.log(0.05, 100.0, 200)
            rep = cmverify.remark_criterion_check(a, args.step, grid, max_order, args.dead_band)
        else:
            grid = args.grid or GridSpec.log(0.01, 100.0, 200)
            rep = cmverify.logcm_difference_check(a, args.s, args.t, grid, max_order, args.dead_band)
        out.append(from_cm_report(rep))
    return out


def _cmd_verify_claims(args) -> List[Result]:
    out = [from_claim(c) for c in cmverify.verify_series_claims(args.max_index)]
    for a in (0.0, 0.5):
        for t in args.series_t:
            r = cmverify.series_vs_direct(a, t, args.terms)
            params = {"a": a, "t": t, "terms": args.terms}
            out.append(from_scalar(f"series_vs_direct(a={a!r})", params, r, r <= SERIES_TOL, tolerance=SERIES_TOL))
    return out


def _points(args, default: GridSpec) -> Sequence[float]:
    if args.x is not None:
        return [args.x]
    return (args.grid or default).points


def _cmd_bounds(args) -> List[Result]:
    if args.kind == "gamma":
        alpha = 0.0 if args.alpha is None else args.alpha
        beta = 0.5 if args.beta is None else args.beta
        xs = _points(args, GridSpec.log(1e-2, 1e3, 50))
        return [
            from_bound_pair(f"gamma_bounds(alpha={alpha!r},beta={beta!r})", bounds.gamma_bounds(x, alpha, beta)) for x in xs
        ]
    if args.kind == "ratio":
        alpha = 0.5 if args.alpha is None else args.alpha
        beta = 0.0 if args.beta is None else args.beta
        xs = _points(args, GridSpec.log(0.1, 50.0, 20))
        series = f"gamma_ratio_bounds(s={args.s!r},t={args.t!r},alpha={alpha!r},beta={beta!r})"
        return [from_bound_pair(series, bounds.gamma_ratio_bounds(x, args.s, args.t, alpha, beta)) for x in xs]
    if args.kind == "lemma":
        if args.x is not None:
            raise UsageError("--kind lemma takes --grid, not --x")
        return [from_claim(c) for c in bounds.lemma_inequalities_check(args.grid, args.orders)]
    if args.kind == "limits":
        x = 1e4 if args.x is None else args.x
        return [from_claim(c) for c in bounds.asymptotic_limit_checks(x)]
    xs = _points(args, GridSpec.log(10.0, 1e4, 4))
    out = []
    for x in xs:
        ratio = bounds.width_decay_ratio(x)
        width = bounds.relative_width(x)
        ok = 3.8 <= ratio <= 4.2 if x >= 10.0 else math.isfinite(ratio)
        out.append(from_scalar("width_decay_ratio", {"x": x}, ratio, ok, relative_width=width))
    return out


def _cmd_counterexample(args) -> List[Result]:
    return [from_counterexample(bounds.gamma_bound_counterexample(args.side, args.a, args.grid, factor=args.factor))]


SWEEP_SHIFTS = (0.0, 0.1, 0.25, 0.4, 0.5, 0.7, 1.0, 5.0)


def _cmd_sweep(args) -> List[Result]:
    cfg = _cfg(args)
    grid = args.grid or GridSpec.log(0.05, 100.0, 200)
    max_order = _max_order(args.orders)
    out: List[Result] = []
    for a in SWEEP_SHIFTS:
        out.append(from_cm_report(cmverify.classify_fa(a, grid, max_order)))
    for a in (0.0, 0.5, 1.0):
        out.append(from_cm_report(cmverify.remark_criterion_check(a, 1.0, grid, max_order)))
    t_grid = GridSpec.log(1e-3, 100.0, 200)
    for a in (0.0, 0.3, 0.5):
        out.append(from_kernel_sign(cmverify.kernel_sign_sweep(a, t_grid)))
    out.append(from_threshold(cmverify.threshold_curve_report(t_grid, cfg=cfg)))
    out.extend(from_claim(c) for c in cmverify.verify_series_claims(1000))
    for a in (0.0, 0.5):
        for x in (0.5, 1.0, 3.0, 10.0):
            r = functions.theta_representation_check(a, x, cfg)
            out.append(
                from_scalar(
                    "theta_representation", {"a": a, "x": x}, r, abs(r) <= REPRESENTATION_TOL, tolerance=REPRESENTATION_TOL
                )
            )
    for x in GridSpec.log(1e-2, 1e3, 25).points:
        out.append(from_bound_pair("gamma_bounds(alpha=0.0,beta=0.5)", bounds.gamma_bounds(x)))
    for x in (0.5, 1.0, 5.0, 20.0):
        out.append(from_bound_pair("gamma_ratio_bounds(s=0.0,t=1.0,alpha=0.5,beta=0.0)", bounds.gamma_ratio_bounds(x, 0.0, 1.0)))
    out.extend(from_claim(c) for c in bounds.lemma_inequalities_check())
    out.extend(from_claim(c) for c in bounds.asymptotic_limit_checks())
    for side, a in (("lower", 0.45), ("upper", 0.05)):
        out.append(from_counterexample(bounds.gamma_bound_counterexample(side, a), expect_found=True))
    return out


HANDLERS: Dict[str, Callable] = {
    "eval": _cmd_eval,
    "kernel": _cmd_kernel,
    "verify-cm": _cmd_verify_cm,
    "verify-claims": _cmd_verify_claims,
    "bounds": _cmd_bounds,
    "counterexample": _cmd_counterexample,
    "sweep": _cmd_sweep,
}

# Every library operation and one command line that reaches it.
OPERATIONS: Dict[str, List[str]] = {
    "ln_gamma": ["eval", "--fn", "lngamma", "--x", "0.5"],
    "digamma": ["eval", "--fn", "digamma", "--x", "1"],
    "polygamma": ["eval", "--fn", "polygamma", "--order", "3", "--x", "1.5"],
    "trigamma": ["eval", "--fn", "trigamma", "--x", "1"],
    "stirling_remainder": ["eval", "--fn", "theta", "--x", "1"],
    "F_a": ["eval", "--fn", "F", "--a", "0", "--x", "1"],
    "f_a": ["eval", "--fn", "f", "--a", "0.5", "--x", "1"],
    "f_a_direct": ["eval", "--fn", "f-direct", "--a", "0.5", "--x", "1"],
    "g_a": ["eval", "--fn", "g", "--a", "0", "--x", "1"],
    "f_a_derivative": ["eval", "--fn", "f-deriv", "--a", "0.5", "--x", "1", "--order", "2"],
    "difference_closed_form": ["eval", "--fn", "difference", "--a", "0", "--x", "1"],
    "difference_derivative_closed_form": ["eval", "--fn", "difference-deriv", "--a", "0", "--x", "1"],
    "binet_theta": ["eval", "--fn", "theta-quad", "--x", "2", "--route", "arctan_kernel"],
    "theta_representation_check": ["eval", "--fn", "representation", "--a", "0.5", "--x", "3"],
    "laplace_difference_derivative": ["eval", "--fn", "laplace", "--a", "1", "--x", "2"],
    "phi_kernel": ["kernel", "--fn", "phi", "--a", "0.25", "--t", "2"],
    "phi1": ["kernel", "--fn", "phi1", "--t", "50"],
    "phi_threshold": ["kernel", "--fn", "threshold", "--grid", "0.001:100:20:log"],
    "phi_threshold_binet_form": ["kernel", "--fn", "threshold-binet", "--t", "1"],
    "phi2": ["kernel", "--fn", "phi2", "--t", "1"],
    "binet_bracket": ["kernel", "--fn", "bracket", "--t", "1"],
    "kernel_sign_sweep": ["kernel", "--check", "sign", "--a", "0.3"],
    "threshold_curve_report": ["kernel", "--check", "threshold"],
    "series_vs_direct": ["kernel", "--check", "series", "--a", "0.5", "--t", "0.5"],
    "classify_fa": ["verify-cm", "--a", "0", "--grid", "0.05:100:40:log", "--orders", "0..6"],
    "remark_criterion_check": ["verify-cm", "--a", "0.5", "--criterion", "difference", "--grid", "0.05:100:40:log"],
    "logcm_difference_check": ["verify-cm", "--a", "1", "--criterion", "logcm", "--s", "0.2", "--t", "0.7", "--grid", "0.05:100:40:log"],
    "verify_series_claims": ["verify-claims", "--max-index", "1000"],
    "gamma_bounds": ["bounds", "--kind", "gamma", "--x", "1"],
    "gamma_ratio_bounds": ["bounds", "--kind", "ratio", "--x", "1", "--s", "0", "--t", "1"],
    "lemma_inequalities_check": ["bounds", "--kind", "lemma"],
    "asymptotic_limit_checks": ["bounds", "--kind", "limits"],
    "relative_width": ["bounds", "--kind", "width", "--x", "10"],
    "gamma_bound_counterexample": ["counterexample", "--side", "lower", "--a", "0.4"],
    "run": ["sweep", "--grid", "0.05:100:30:log"],
    "emit_csv": ["verify-cm", "--a", "0", "--grid", "0.05:100:2:log", "--orders", "0..2", "--format", "csv"],
}

# Public functions reached only through another operation, mapped to the
# OPERATIONS entry that exercises them.
INDIRECT_OPERATIONS = {
    "threshold_crossing": "kernel_sign_sweep",
    "threshold_integral_residual": "threshold_curve_report",
    "series_partial_sum": "series_vs_direct",
    "width_decay_ratio": "relative_width",
    "f_a_derivative_with_scale": "gamma_bounds",
}


# --------------------------------------------------------------------------
# entry points


def _command_echo(args, argv: Sequence[str]) -> dict:
    opts = {}
    for k, v in sorted(vars(args).items()):
        if k in ("output", "timing"):
            continue
        if isinstance(v, GridSpec):
            v = v.to_dict()
        opts[k] = v
    return {"subcommand": args.subcommand, "argv": list(argv), "options": opts}


def run(args, argv: Sequence[str] = ()) -> ReportDocument:
    """Dispatch parsed arguments and build the report document."""
    thread_count()  # validate MONOCERT_THREADS early
    start = time.perf_counter()
    results = HANDLERS[args.subcommand](args)
    timing = time.perf_counter() - start if args.timing else None
    return ReportDocument(command=_command_echo(args, argv), results=results, timing=timing)


def render(doc: ReportDocument, fmt: str) -> str:
    return {"csv": emit_csv, "json": emit_json, "table": emit_table}[fmt](doc)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: help -> 0, errors -> 64 (see _Parser)
        return int(exc.code or 0)
    try:
        doc = run(args, argv)
    except ConvergenceError as exc:
        cfg = exc.config.to_dict() if exc.config is not None else None
        sys.stderr.write(f"monocert: numerical non-convergence: {exc}\n")
        sys.stderr.write("quadrature config: " + json.dumps({"config": cfg, "tail_bound": exc.tail_bound}) + "\n")
        return EXIT_INCONCLUSIVE
    except (UsageError, MonocertError, ValueError) as exc:
        sys.stderr.write(f"monocert {args.subcommand}: error: {exc}\n")
        return EXIT_USAGE
    text = render(doc, args.format)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            sys.stderr.write(f"monocert: cannot write report to {args.output!r}: {exc.strerror or exc}\n")
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return doc.exit_status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
