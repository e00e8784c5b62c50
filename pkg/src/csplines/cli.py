"""Command-line interface: ``csplines {fit,predict,info,verify}``.

Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 verification
failure.  Every error is reported as a single ``error: ...`` line on stderr.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings

import numpy as np

from . import model as model_io
from . import oracle
from .basis import SplineConfig, column_layout
from .dataset import Dataset
from .exceptions import CSplineError, OutOfDomainError, RankDeficiencyWarning
from .grid import GridSpec
from .linalg import DEFAULT_TOL

EXIT_IO = 1
EXIT_INVALID = 2
EXIT_VERIFY = 3

SCALE_WARN = 1e3


class CliError(Exception):
    def __init__(self, message, code=EXIT_INVALID):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _finite_float(text):
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def _parse_fields(fields, lineno):
    try:
        values = [float(f) for f in fields]
    except ValueError:
        return None
    for v in values:
        if not math.isfinite(v):
            raise CliError(f"line {lineno}: non-finite value in {fields}")
    return values


def read_table(path, ncols):
    """Read a comma- or whitespace-delimited numeric table.

    ``ncols`` is a tuple of accepted column counts.  A leading non-numeric
    row is treated as a header.  Returns ``(rows, line_numbers)``.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from exc
    rows, linenos = [], []
    seen_first = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")] if "," in line else line.split()
        values = _parse_fields(fields, lineno)
        if values is None:
            if not seen_first:
                seen_first = True
                continue
            raise CliError(f"line {lineno}: non-numeric field in {line!r}")
        seen_first = True
        if len(values) not in ncols:
            raise CliError(f"line {lineno}: expected {' or '.join(map(str, ncols))} fields, got {len(values)}")
        rows.append(values)
        linenos.append(lineno)
    return rows, linenos


def _grid_and_config(args):
    try:
        grid = GridSpec(args.ax, args.bx, args.ay, args.by, args.I, args.J)
        config = SplineConfig(args.degree, args.smoothness)
    except CSplineError as exc:
        raise CliError(str(exc)) from exc
    return grid, config


def _scale_warnings(grid, out):
    for name, width in (("dx", grid.dx), ("dy", grid.dy)):
        if width > SCALE_WARN or width < 1 / SCALE_WARN:
            print(f"warning: {name}={width!r} is far from unit scale; consider rescaling the inputs",
                  file=out)


def _row_error(exc, linenos, path):
    if isinstance(exc, OutOfDomainError) and exc.row is not None and exc.row < len(linenos):
        return CliError(f"{path} line {linenos[exc.row]}: {exc}")
    return CliError(str(exc))


def cmd_fit(args, out):
    grid, config = _grid_and_config(args)
    rows, linenos = read_table(args.input, (3,))
    if not rows:
        raise CliError(f"{args.input}: no data rows")
    arr = np.array(rows)
    data = Dataset(arr[:, 0], arr[:, 1], arr[:, 2])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RankDeficiencyWarning)
        try:
            fitted = model_io.fit(data, grid, config, args.tol)
        except CSplineError as exc:
            raise _row_error(exc, linenos, args.input) from exc
    try:
        model_io.save(fitted, args.output)
    except OSError as exc:
        raise CliError(f"cannot write {args.output}: {exc.strerror}", EXIT_IO) from exc
    print(f"N={fitted.n_points}", file=out)
    print(f"m={fitted.m}", file=out)
    print(f"K={grid.K}", file=out)
    print(f"effective_rank={fitted.effective_rank}", file=out)
    print(f"residual_norm={fitted.residual_norm!r}", file=out)
    _scale_warnings(grid, out)
    for w in caught:
        if issubclass(w.category, RankDeficiencyWarning):
            print(f"warning: {w.message}", file=out)
    if fitted.empty_partitions:
        print(f"warning: empty partitions k={list(fitted.empty_partitions)}", file=out)
    print(f"model written to {args.output}", file=out)
    return 0


def cmd_predict(args, out):
    try:
        fitted = model_io.load(args.model)
    except OSError as exc:
        raise CliError(f"cannot read {args.model}: {exc.strerror}", EXIT_IO) from exc
    except CSplineError as exc:
        raise CliError(f"{args.model}: {exc}") from exc
    rows, linenos = read_table(args.input, (2, 3))
    pts = np.array([r[:2] for r in rows]).reshape(-1, 2)
    n_outside = int(np.count_nonzero(~fitted.grid.contains(pts[:, 0], pts[:, 1])))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            z = model_io.predict(fitted, pts, extrapolate=args.extrapolate)
        except CSplineError as exc:
            raise _row_error(exc, linenos, args.input) from exc
    lines = ["x,y,z"] + [f"{float(a)!r},{float(b)!r},{float(c)!r}" for (a, b), c in zip(pts, z)]
    try:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise CliError(f"cannot write {args.output}: {exc.strerror}", EXIT_IO) from exc
    print(f"predictions={len(z)}", file=out)
    if n_outside:
        print(f"warning: {n_outside} point(s) extrapolated outside the domain", file=out)
    return 0


def cmd_info(args, out):
    grid, config = _grid_and_config(args)
    layout = column_layout(grid, config)
    print(f"K={grid.K}", file=out)
    print(f"dx={grid.dx!r}", file=out)
    print(f"dy={grid.dy!r}", file=out)
    print(f"d={config.d} r={config.r}", file=out)
    print(f"m={layout.m}", file=out)
    _scale_warnings(grid, out)
    print("column p q x_piece y_piece", file=out)
    for n, c in enumerate(layout.columns, start=1):
        xs = "G" if c.x_piece is None else c.x_piece
        ys = "G" if c.y_piece is None else c.y_piece
        print(f"{n} {c.p} {c.q} {xs} {ys}", file=out)
    return 0


def cmd_verify(args, out):
    for name in ("max_I", "max_J", "max_degree"):
        if getattr(args, name) < 1:
            raise CliError(f"--{name.replace('_', '-')} must be >= 1")
    if args.samples < 1 or args.samples_per_boundary < 1:
        raise CliError("sample counts must be >= 1")
    if not (args.tol > 0 and args.continuity_tol > 0):
        raise CliError("tolerances must be positive")
    configs = list(oracle.sweep_configurations(args.max_I, args.max_J, args.max_degree))
    lines = [
        f"seed={args.seed} samples={args.samples} samples_per_boundary={args.samples_per_boundary} "
        f"span_tol={args.tol!r} continuity_tol={args.continuity_tol!r}"
    ]
    failed = []
    for n, (grid, config) in enumerate(configs):
        fault = args.self_test_fault and n == len(configs) - 1
        try:
            report = oracle.verify_configuration(
                grid, config, n_samples=args.samples, tol=args.tol,
                continuity_tol=args.continuity_tol,
                samples_per_boundary=args.samples_per_boundary, seed=args.seed, fault=fault)
        except ValueError as exc:
            raise CliError(f"config I={grid.I} J={grid.J} d={config.d} r={config.r}: {exc}") from exc
        line = report.line()
        if fault:
            line += " fault=injected"
        lines.append(line)
        if not report.passed:
            failed.append(report.name)
    lines.append(f"summary configurations={len(configs)} failed={len(failed)}")
    text = "\n".join(lines) + "\n"
    out.write(text)
    if args.report:
        try:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write {args.report}: {exc.strerror}", EXIT_IO) from exc
    if failed:
        raise CliError(f"verification failed for {'; '.join(failed)}", EXIT_VERIFY)
    return 0


def _add_grid_flags(p):
    p.add_argument("--ax", type=_finite_float, required=True, help="lower x bound")
    p.add_argument("--bx", type=_finite_float, required=True, help="upper x bound")
    p.add_argument("--ay", type=_finite_float, required=True, help="lower y bound")
    p.add_argument("--by", type=_finite_float, required=True, help="upper y bound")
    p.add_argument("--I", dest="I", type=int, required=True, help="cells along x")
    p.add_argument("--J", dest="J", type=int, required=True, help="cells along y")
    p.add_argument("--degree", type=int, required=True, help="polynomial degree d")
    p.add_argument("--smoothness", type=int, required=True, help="continuity order r <= d")


def build_parser():
    parser = _Parser(prog="csplines", description="Cartesian spline fitting and verification.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a C-spline to x,y,z data")
    p.add_argument("--input", required=True)
    _add_grid_flags(p)
    p.add_argument("--output", required=True, help="model document path")
    p.add_argument("--tol", type=_finite_float, default=DEFAULT_TOL)
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("predict", help="evaluate a fitted model at x,y points")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--extrapolate", action="store_true",
                   help="evaluate out-of-domain points in the nearest cell")
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("info", help="describe the basis layout")
    _add_grid_flags(p)
    p.set_defaults(handler=cmd_info)

    p = sub.add_parser("verify", help="check the direct base against the null-space oracle")
    p.add_argument("--max-I", dest="max_I", type=int, default=3)
    p.add_argument("--max-J", dest="max_J", type=int, default=3)
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--samples-per-boundary", type=int, default=50)
    p.add_argument("--tol", type=_finite_float, default=1e-8, help="span rank tolerance")
    p.add_argument("--continuity-tol", type=_finite_float, default=1e-10)
    p.add_argument("--seed", type=int, default=oracle.DEFAULT_SEED)
    p.add_argument("--report", help="also write the report to this path")
    p.add_argument("--self-test-fault", action="store_true",
                   help="corrupt one basis column in the last configuration")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args, out)
    except CliError as exc:
        out.flush()
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
