"""Command-line front end: ``quatcurv verify | eval | charts``.

Exit codes: 0 success, 1 identity failure or out-of-domain evaluation,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, ExprError, GeometryError, InvalidLameParams, OutOfDomain, QuatCurvError, UnknownChart
from .expr import evaluate, parse, to_text
from .geometry import BUILTIN_CHARTS, Chart, QuatField, builtin_chart, load_definition, validate_chart
from .harness.report import IoError, emit_report
from .harness.suite import full_verification
from .operators import LameParams, OperatorConfig, Operators

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# operator name -> (Operators method, has scalar output, has vector output)
EVAL_OPS = {
    "grad": ("grad", False, True),
    "div": ("div", True, False),
    "curl": ("curl", False, True),
    "mt": ("mt_left", True, True),
    "mtr": ("mt_right", True, True),
    "lap0": ("laplace_scalar", True, False),
    "lapv": ("laplace_vector", False, True),
    "laph": ("laplace_quat", True, True),
    "bitsv": ("bitsadze_vector", False, True),
    "bitsh": ("bitsadze_quat", True, True),
    "lame": ("lame_direct", False, True),
}


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"quatcurv: {msg}", file=sys.stderr)


def _number(text: str) -> float:
    e = parse(text.strip())
    if not e.is_constant():
        raise UsageError(f"expected a number, got {text!r}")
    return float(evaluate(e, {}))


def parse_point(text: str) -> tuple[float, float, float]:
    """``"2,pi/2,0"`` -> (2.0, 1.5707..., 0.0)."""
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"point {text!r} must be three comma-separated coordinates")
    try:
        return tuple(_number(p) for p in parts)
    except ExprError as exc:
        raise UsageError(f"point {text!r}: {exc}") from exc


def parse_param(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise UsageError(f"parameter {text!r} must look like name=value")
    try:
        return name.strip(), _number(value)
    except ExprError as exc:
        raise UsageError(f"parameter {text!r}: {exc}") from exc


def _config(args) -> OperatorConfig:
    if args.mode == "symbolic":
        return OperatorConfig()
    try:
        return OperatorConfig.fd(args.step, args.scheme)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# verify

def run_verify(args) -> int:
    charts = [c.strip() for c in args.charts.split(",") if c.strip()]
    if not charts:
        raise UsageError("--charts is empty")
    for name in charts:
        builtin_chart(name)
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    if args.points < 1:
        raise UsageError("--points must be at least 1")
    if args.tolerance is not None and not args.tolerance > 0:
        raise UsageError("--tolerance must be positive")
    report = full_verification(charts, args.seed, args.count, _config(args), args.points, args.tolerance)
    if args.output in (None, "-"):
        sys.stdout.write(report.to_json())
    else:
        emit_report(report, args.output)
    for r in report.failures():
        _err(f"FAIL {r.identity} [{r.chart}]: max error {r.max_error:.3g} > {r.tolerance:g} {r.note}".rstrip())
    return EXIT_OK if report.passed else EXIT_FAIL


# eval

def _chart_arg(text: str) -> Chart:
    if text in BUILTIN_CHARTS:
        return builtin_chart(text)
    if Path(text).is_file():
        return load_definition(text).chart
    return builtin_chart(text)  # raises UnknownChart


def _field(args, points: np.ndarray) -> QuatField:
    inline = [getattr(args, k) for k in ("f0", "f1", "f2", "f3", "f0i", "f1i", "f2i", "f3i")]
    if args.field is not None:
        if any(v is not None for v in inline) or args.param:
            raise UsageError("--field cannot be combined with inline components or --param")
        definition = load_definition(args.field)
        if definition.field is None:
            raise UsageError(f"{args.field} has no field section")
        chart = definition.chart
        if args.chart is not None and args.chart != chart.name:
            raise UsageError(f"--chart {args.chart!r} does not match the field file's chart {chart.name!r}")
        field = definition.field
    else:
        if args.chart is None:
            raise UsageError("--chart is required with inline components")
        chart = _chart_arg(args.chart)
        params = dict(parse_param(p) for p in args.param)
        re = [v or "0" for v in inline[:4]]
        im = [v or "0" for v in inline[4:]]
        field = QuatField.from_strings(chart, *re, f0i=im[0], f1i=im[1], f2i=im[2], f3i=im[3], params=params)
    if not chart.validated:
        chart.require_domain(points)
        chart = validate_chart(chart, points)
        field = QuatField(chart, field.f0, field.fv)
    return field


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def run_eval(args) -> int:
    if not args.point:
        raise UsageError("eval needs at least one --point")
    points = np.array([parse_point(p) for p in args.point], dtype=float)
    field = _field(args, points)
    chart = field.chart
    method, has_scalar, has_vector = EVAL_OPS[args.op]
    ops = Operators(chart, _config(args))
    q = ops.field(field)
    if args.op == "lame":
        if args.mu is None or args.lam is None:
            raise UsageError("--op lame needs --mu and --lambda")
        try:
            result = ops.lame_direct(q, LameParams(args.mu, args.lam))
        except InvalidLameParams as exc:
            raise UsageError(str(exc)) from exc
    else:
        result = getattr(ops, method)(q)
    chart.require_domain(points)
    values = ops.evaluate(result, points)
    for p, v in zip(points, values):
        line = {"chart": chart.name, "op": args.op, "point": [float(x) for x in p]}
        line["scalar"] = _pair(v[0]) if has_scalar else None
        line["vector"] = [_pair(c) for c in v[1:]] if has_vector else None
        print(json.dumps(line))
    return EXIT_OK


# charts

def chart_info(chart: Chart) -> dict:
    return {
        "name": chart.name,
        "coords": list(chart.coord_names),
        "maps": {k: to_text(m) for k, m in zip("xyz", chart.maps)},
        "metric": ", ".join(to_text(h) for h in chart.metric),
        "domain": chart.domain_text or chart.domain.describe(chart.coord_names),
    }


def run_charts(args) -> int:
    names = [args.name] if args.name else list(BUILTIN_CHARTS)
    infos = [chart_info(builtin_chart(n)) for n in names]
    if args.json:
        for info in infos:
            print(json.dumps(info))
        return EXIT_OK
    for info in infos:
        print(info["name"])
        print(f"  coords: {', '.join(info['coords'])}")
        print(f"  maps:   x = {info['maps']['x']}, y = {info['maps']['y']}, z = {info['maps']['z']}")
        print(f"  metric: {info['metric']}")
        print(f"  domain: {info['domain']}")
    return EXIT_OK


# argument parsing

def _add_mode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("symbolic", "fd"), default="symbolic",
                   help="derivative engine (default: symbolic)")
    p.add_argument("--step", type=float, default=1e-4, help="finite-difference step (default: 1e-4)")
    p.add_argument("--scheme", choices=("central2", "central4", "richardson"), default="central2",
                   help="finite-difference scheme (default: central2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quatcurv",
        description="Quaternionic first- and second-order operators on orthogonal coordinate charts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the identity and closed-form suites")
    v.add_argument("--charts", default=",".join(BUILTIN_CHARTS),
                   help="comma-separated built-in chart names (default: all)")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--count", type=int, default=50, help="fields per chart")
    v.add_argument("--points", type=int, default=20, help="sample points per field")
    v.add_argument("--tolerance", type=float, help="override every record's tolerance")
    v.add_argument("--output", help="report path (default: stdout)")
    _add_mode_flags(v)
    v.set_defaults(run=run_verify)

    e = sub.add_parser("eval", help="evaluate an operator at points")
    e.add_argument("--chart", help="built-in chart name or definition file")
    e.add_argument("--field", help="definition file with a field section")
    for k in range(4):
        e.add_argument(f"--f{k}", help=f"real part of component {k}")
        e.add_argument(f"--f{k}i", help=f"imaginary part of component {k}")
    e.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    e.add_argument("--op", required=True, choices=tuple(EVAL_OPS))
    e.add_argument("--point", action="append", default=[], metavar="Q1,Q2,Q3",
                   help="coordinates in chart order; repeatable")
    e.add_argument("--mu", type=float, help="shear modulus for --op lame")
    e.add_argument("--lambda", dest="lam", type=float, help="first Lame parameter for --op lame")
    _add_mode_flags(e)
    e.set_defaults(run=run_eval)

    c = sub.add_parser("charts", help="list built-in charts")
    c.add_argument("--name", help="show a single chart")
    c.add_argument("--json", action="store_true", help="one JSON object per line")
    c.set_defaults(run=run_charts)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except OutOfDomain as exc:
        _err(str(exc))
        return EXIT_FAIL
    except DomainError as exc:
        _err(f"evaluation failed: {exc}")
        return EXIT_FAIL
    except (UsageError, UnknownChart) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except IoError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except (ExprError, GeometryError, QuatCurvError) as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
