"""Command line entry point.

Exit codes: 0 when every executed stage passed, 1 on a mathematical failure,
2 on a usage or parse error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from .codec import (
    InstanceSpec,
    SchemaError,
    canonical_json,
    dump_instance,
    encode_value,
    load_json,
    metric_instance,
    parse_instance,
    parse_series_request,
    with_truncation,
)
from .frobenius import Mismatch, ScalingError, match_up_to_scaling, recover_intersection_form
from .instances import SUPPORTED, InstanceError, coxeter_chart, elliptic_series_fixture
from .operators import fraction
from .pipeline import MATH_ERRORS, STAGES, StageError, build_structure, emit_report, run_config, run_pipeline

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

STAGE_COMMANDS = {
    "check-pencil": ("pencil",),
    "build": ("build",),
    "verify": ("verify",),
    "roundtrip": ("roundtrip",),
}


def _lambda(text: str) -> Any:
    try:
        return fraction(text)
    except (TypeError, ValueError) as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="Sampling seed (default: options.seed, then $MINIFROB_SEED).")
    p.add_argument("--points", type=int, default=None, help="Random points per lambda value.")
    p.add_argument(
        "--lambda", dest="lambdas", type=_lambda, action="append", default=None, help="Pencil parameter, repeatable."
    )
    p.add_argument("--truncation", type=int, default=None, help="Lower the q-series truncation of the input.")
    p.add_argument("--symbolic-curvature", action="store_true", default=None, help="Also check curvature symbolically.")
    p.add_argument("--timings", action="store_true", help="Include stage timings in the report.")


def _output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--output", "-o", type=Path, default=None, help="Write to this file instead of stdout.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minifrob", description="Frobenius structures from flat pencils of metrics, checked exactly."
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, stages in STAGE_COMMANDS.items():
        p = sub.add_parser(name, help=f"Run the {' and '.join(stages)} stage with its prerequisites.")
        p.add_argument("instance", type=Path)
        _run_flags(p)
        _output_flags(p)

    p = sub.add_parser("run", help="Run every stage, or the ones named with --stage.")
    p.add_argument("instance", type=Path)
    p.add_argument("--stage", dest="stages", action="append", choices=list(STAGES), default=None)
    _run_flags(p)
    _output_flags(p)

    p = sub.add_parser("match", help="Build two instances and find the scaling relating them.")
    p.add_argument("first", type=Path)
    p.add_argument("second", type=Path)
    p.add_argument("--seed", type=int, default=None)
    _output_flags(p)

    p = sub.add_parser("coxeter", help="Emit a metric-block fixture for a Coxeter orbit space.")
    p.add_argument("type", choices=["A", "B"])
    p.add_argument("rank", type=int)
    p.add_argument("--unit-scale", type=_lambda, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", "-o", type=Path, default=None)

    p = sub.add_parser("fixture-series", help="Solve WDVV order by order and emit a metric-block fixture.")
    p.add_argument("request", type=Path)
    p.add_argument("--truncation", type=int, default=None)
    p.add_argument("--output", "-o", type=Path, default=None)
    return parser


def _write(data: bytes, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        output.write_bytes(data)


def _load_spec(path: Path, truncation: Optional[int] = None) -> InstanceSpec:
    spec = parse_instance(load_json(path))
    if truncation is not None:
        spec = with_truncation(spec, truncation)
    return spec


def _cmd_stages(args: argparse.Namespace, stages: Sequence[str]) -> int:
    spec = _load_spec(args.instance, args.truncation)
    config = run_config(spec, args.seed, args.points, args.lambdas, args.symbolic_curvature, args.timings)
    report = run_pipeline(spec, stages, config)
    _write(emit_report(report, args.format, args.timings), args.output)
    return report.exit_code


def _cmd_match(args: argparse.Namespace) -> int:
    structures = []
    for path in (args.first, args.second):
        spec = _load_spec(path)
        seed = args.seed if args.seed is not None else run_config(spec).seed
        try:
            structures.append(build_structure(spec, seed))
        except MATH_ERRORS as err:
            out: Dict[str, Any] = {"matched": False, "error": f"{path}: {err}"}
            _write(canonical_json(out) + b"\n", args.output)
            return EXIT_FAILURE
    try:
        found: Union[Fraction, Mismatch] = match_up_to_scaling(structures[0], structures[1])
    except ScalingError as err:
        found = Mismatch("deg", str(err))
    if isinstance(found, Mismatch):
        out = {"matched": False, "component": found.component, "detail": found.detail}
        code = EXIT_FAILURE
    else:
        out = {"matched": True, "scaling": encode_value(found)}
        code = EXIT_OK
    if args.format == "text":
        text = f"scaling {out['scaling']}\n" if code == EXIT_OK else f"no match: {out.get('detail', out.get('error'))}\n"
        _write(text.encode("utf-8"), args.output)
    else:
        _write(canonical_json(out) + b"\n", args.output)
    return code


def _cmd_coxeter(args: argparse.Namespace) -> int:
    if args.rank not in SUPPORTED[args.type]:
        raise SchemaError(f"unsupported group {args.type}{args.rank}", "rank")
    try:
        chart = coxeter_chart(args.type, args.rank, args.seed, args.unit_scale)
    except InstanceError as err:
        logger.error("%s", err)
        return EXIT_FAILURE
    assert chart.g_t is not None and chart.eta is not None
    data = metric_instance(chart.deg, chart.eta, chart.g_t, name=f"{args.type}{args.rank} in flat coordinates")
    _write(dump_instance(data).encode("utf-8"), args.output)
    return EXIT_OK


def _cmd_fixture_series(args: argparse.Namespace) -> int:
    request = parse_series_request(load_json(args.request))
    N = request.truncation if args.truncation is None else args.truncation
    if N < 1:
        raise SchemaError("truncation must be positive", "truncation")
    try:
        potential = elliptic_series_fixture(request.deg.n, request.deg, request.eta, N, request.seed_layers)
    except InstanceError as err:
        logger.error("%s", err)
        return EXIT_FAILURE
    g = recover_intersection_form(potential, request.eta, request.deg)
    data = metric_instance(request.deg, request.eta, g, request.name, request.options)
    _write(dump_instance(data).encode("utf-8"), args.output)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command in STAGE_COMMANDS:
            return _cmd_stages(args, STAGE_COMMANDS[args.command])
        if args.command == "run":
            return _cmd_stages(args, args.stages or list(STAGES))
        if args.command == "match":
            return _cmd_match(args)
        if args.command == "coxeter":
            return _cmd_coxeter(args)
        return _cmd_fixture_series(args)
    except (SchemaError, StageError) as err:
        print(f"minifrob: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"minifrob: cannot read input: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
