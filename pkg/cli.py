"""
Command-line front end.

    python cli.py verify --suite all --dim 2 --seed 42 --out report.json
    python cli.py sweep phi --gamma power:0.5 --p -0.9:4:25
    python cli.py sweep berwald --f indicator:interval01 --h affine:x --p -0.5,1,2
    python cli.py body --shape disk
    python cli.py fn --f expnorm:simplex2 --compute zhang-ratio
    python cli.py covariogram --f indicator:interval01 --grid 5

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

import argparse
import itertools
import logging
import math
import os
import re
import sys
from dataclasses import replace
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.spatial import QhullError

from berwald import (DivergentIntegralError, berwald_classical, berwald_epigraph, holder_mean,
                     phi_gamma)
from functionals import (CovariogramFn, CovariogramMethod, polar_projection_body,
                         polar_projection_fn, radial_table, star_volume, zhang_body_bounds)
from geometry import Body, volume, width
from logconcave import Epigraph, FunctionKind, l1_norm
from numerics import QuadratureError, direction_grid
from presets import Presets, SuiteDefaults, load_body_file, load_suite_file
from report_writer import reports_to_frame, write_json_report, write_table
from verify import SuiteConfig, run_suite, suite_names, suite_passed, zhang_sides

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
SEED_VARIABLE = "LCG_SEED"
COVARIOGRAM_LEVEL = 10.0


class UsageError(ValueError):
    """Bad command-line input."""


def parse_p_grid(text: str) -> List[float]:
    """'a:b:n' (n >= 2 evenly spaced values) or a comma-separated list; all values > -1."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"p grid '{text}' is not min:max:steps")
        low, high, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if steps < 2:
            raise UsageError("p grid needs at least 2 steps")
        values = [float(v) for v in np.linspace(low, high, steps)]
    else:
        values = [float(part) for part in text.split(",") if part.strip()]
    if not values:
        raise UsageError("empty p grid")
    if any(p <= -1 for p in values):
        raise UsageError("p grid values must exceed -1")
    return values


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """Turn '--p -0.9:4:25' into '--p=-0.9:4:25' so argparse does not read a flag."""
    joined, tokens = [], list(argv)
    index = 0
    while index < len(tokens):
        token = tokens[index]
        if (token in ("--p", "--tol") and index + 1 < len(tokens)
                and re.match(r"^-\.?\d", tokens[index + 1])):
            joined.append(f"{token}={tokens[index + 1]}")
            index += 2
            continue
        joined.append(token)
        index += 1
    return joined


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cli.py",
        description="Berwald, Zhang and Petty inequalities for log-concave functions in dimensions 1-3")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress to stderr (-v info, -vv debug)")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="run the inequality suite")
    verify.add_argument("--suite", default=None, help="comma-separated suites or 'all'")
    verify.add_argument("--dim", type=int, default=None, choices=(2, 3))
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--tol", type=float, default=None,
                        help="replace every check tolerance")
    verify.add_argument("--grid", type=int, default=None, help="number of grid directions")
    verify.add_argument("--mc-samples", type=int, default=None)
    verify.add_argument("--presets", default=None,
                        help="comma-separated preset names to restrict the cases to")
    verify.add_argument("--config", default=None, help="INI file with [suite] and [body.<name>]")
    verify.add_argument("--timings", action="store_true", help="record runtime_ms per check")
    verify.add_argument("--format", choices=("json", "csv"), default="json")
    verify.add_argument("--out", default=None)

    sweep = commands.add_parser("sweep", help="evaluate a functional over a p grid")
    sweep.add_argument("target", choices=("phi", "berwald", "classical", "holder"))
    sweep.add_argument("--gamma", help="profile descriptor for phi")
    sweep.add_argument("--f", help="function descriptor for berwald")
    sweep.add_argument("--h", default="chord", help="witness descriptor for berwald")
    sweep.add_argument("--body", help="body preset for classical and holder")
    sweep.add_argument("--body-file", help="body description file for classical and holder")
    sweep.add_argument("--phi", default="cone", help="function on the body for classical and holder")
    sweep.add_argument("--p", required=True, help="min:max:steps or a comma-separated list")
    sweep.add_argument("--out", default=None)

    body = commands.add_parser("body", help="volume, polar projection body and Zhang-Petty product")
    body.add_argument("--shape", help="body preset")
    body.add_argument("--body-file", help="body description file")
    body.add_argument("--compute", default="all",
                      choices=("all", "volume", "polar-volume", "zhang-product"))
    body.add_argument("--grid", type=int, default=None)
    body.add_argument("--radial-out", default=None, help="CSV of the radial function of Pi*(K)")

    fn = commands.add_parser("fn", help="quantities of the functional Zhang inequality")
    fn.add_argument("--f", required=True, help="function descriptor")
    fn.add_argument("--compute", default="all", choices=("all", "l1", "polar-volume", "zhang-ratio"))
    fn.add_argument("--grid", type=int, default=None)

    covariogram = commands.add_parser("covariogram", help="sample g_f on a centered grid")
    covariogram.add_argument("--f", required=True, help="function descriptor")
    covariogram.add_argument("--grid", type=int, default=21, help="points per axis (>= 3)")
    covariogram.add_argument("--method", default="level-set",
                             choices=[method.value for method in CovariogramMethod])
    covariogram.add_argument("--out", default=None)
    return parser


def _seed_override(seed: Optional[int]) -> Optional[int]:
    value = os.environ.get(SEED_VARIABLE)
    if value is None or not value.strip():
        return seed
    try:
        return int(value)
    except ValueError as error:
        raise UsageError(f"{SEED_VARIABLE} must be an integer, got '{value}'") from error


def _resolve_body(shape: Optional[str], body_file: Optional[str]) -> Body:
    if body_file:
        return load_body_file(body_file)
    if not shape:
        raise UsageError("give --shape or --body-file")
    return Presets.body(shape)


def _emit(lines: List[str]) -> None:
    sys.stdout.write("\n".join(lines) + "\n")


def cmd_verify(args: argparse.Namespace) -> int:
    if args.config:
        options, bodies = load_suite_file(args.config)
        config = SuiteConfig.from_options(options, bodies)
    else:
        config = SuiteConfig()
    overrides = {}
    if args.suite is not None:
        overrides["suites"] = suite_names(args.suite)
    for key in ("dim", "seed", "tol", "grid", "mc_samples"):
        value = getattr(args, key)
        if value is not None:
            overrides[{"tol": "tolerance", "grid": "grid_size"}.get(key, key)] = value
    if args.presets is not None:
        overrides["presets"] = tuple(name.strip() for name in args.presets.split(",") if name.strip())
    if args.timings:
        overrides["timings"] = True
    seed = _seed_override(overrides.get("seed", config.seed))
    overrides["seed"] = seed
    config = replace(config, **overrides)
    logger.info("running suites %s in dimension %d", ",".join(config.suites), config.dim)

    reports = run_suite(config)
    records = [report.to_dict() for report in reports]
    if args.format == "csv":
        write_table(reports_to_frame(records), args.out)
    else:
        write_json_report(records, args.out)
    failed = [report.name for report in reports if report.status.value == "fail"]
    for name in failed:
        sys.stderr.write(f"FAIL {name}\n")
    return EXIT_OK if suite_passed(reports) else EXIT_FAILED


def cmd_sweep(args: argparse.Namespace) -> int:
    grid = parse_p_grid(args.p)
    if args.target == "phi":
        if not args.gamma:
            raise UsageError("sweep phi needs --gamma")
        profile = Presets.profile(args.gamma)
        profile.check_admissible()
        evaluate_at = lambda p: phi_gamma(profile, p)
    elif args.target == "berwald":
        if not args.f:
            raise UsageError("sweep berwald needs --f")
        f = Presets.function(args.f)
        L, h = Epigraph(f), Presets.witness(args.h, f.dim)
        h.validate(L)
        evaluate_at = lambda p: berwald_epigraph(L, h, p)
    else:
        K = _resolve_body(args.body, args.body_file)
        phi = Presets.concave_function(args.phi, K)
        functional = berwald_classical if args.target == "classical" else holder_mean
        if min(grid) <= 0:
            raise UsageError(f"sweep {args.target} needs p > 0, got {min(grid):g}")
        evaluate_at = lambda p: functional(K, phi, p)

    rows = []
    for p in grid:
        try:
            rows.append((p, evaluate_at(p), "ok"))
        except DivergentIntegralError:
            rows.append((p, math.nan, "diverged"))
        except QuadratureError as error:
            logger.warning("p=%g: %s", p, error)
            rows.append((p, math.nan, "quadrature_failed"))
    write_table(pd.DataFrame(rows, columns=["p", "value", "status"]), args.out)
    return EXIT_OK


def cmd_body(args: argparse.Namespace) -> int:
    K = _resolve_body(args.shape, args.body_file)
    size = args.grid or SuiteDefaults.grid_size(K.dim)
    measure = volume(K)
    if args.compute == "volume":
        _emit([f"{measure:.12g}"])
        return EXIT_OK
    polar = polar_projection_body(K, direction_grid(K.dim, size))
    polar_volume = star_volume(polar)
    product = measure ** (K.dim - 1) * polar_volume
    if args.radial_out:
        write_table(radial_table(polar), args.radial_out)
    if args.compute == "polar-volume":
        _emit([f"{polar_volume:.12g}"])
    elif args.compute == "zhang-product":
        _emit([f"{product:.12g}"])
    else:
        lower, upper = zhang_body_bounds(K.dim)
        _emit([f"volume: {measure:.12g}",
               f"polar_projection_volume: {polar_volume:.12g}",
               f"product: {product:.12g}",
               f"lower_bound: {lower:.12g}",
               f"upper_bound: {upper:.12g}"])
    return EXIT_OK


def cmd_fn(args: argparse.Namespace) -> int:
    f = Presets.function(args.f)
    norm = l1_norm(f)
    if args.compute == "l1":
        _emit([f"{norm:.12g}"])
        return EXIT_OK
    grid = direction_grid(f.dim, args.grid or SuiteDefaults.grid_size(f.dim))
    polar_volume = star_volume(polar_projection_fn(f, grid))
    if args.compute == "polar-volume":
        _emit([f"{polar_volume:.12g}"])
        return EXIT_OK
    lhs, rhs, _ = zhang_sides(f, grid, None)
    if args.compute == "zhang-ratio":
        _emit([f"{lhs / rhs:.12g}"])
        return EXIT_OK
    _emit([f"l1_norm: {norm:.12g}",
           f"polar_projection_volume: {polar_volume:.12g}",
           f"lhs: {lhs:.12g}",
           f"rhs: {rhs:.12g}",
           f"ratio: {lhs / rhs:.12g}"])
    return EXIT_OK


def cmd_covariogram(args: argparse.Namespace) -> int:
    if args.grid < 3:
        raise UsageError("covariogram grid needs at least 3 points per axis")
    f = Presets.function(args.f)
    g = CovariogramFn(f, CovariogramMethod(args.method))
    reach = 1.0 if f.kind is FunctionKind.INDICATOR else f.level_scale(COVARIOGRAM_LEVEL)
    axes = [np.linspace(-extent, extent, args.grid)
            for extent in reach * np.atleast_1d(width(f.body, np.eye(f.dim)))]
    rows = []
    for point in itertools.product(*axes):
        rows.append(list(point) + [g(np.array(point))])
    columns = [f"x{axis + 1}" for axis in range(f.dim)] + ["g_f"]
    write_table(pd.DataFrame(rows, columns=columns), args.out)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "body": cmd_body,
    "fn": cmd_fn,
    "covariogram": cmd_covariogram,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(sys.argv[1:] if argv is None else argv))
    except SystemExit as stop:
        return EXIT_USAGE if stop.code else EXIT_OK

    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ValueError, QhullError) as error:
        sys.stderr.write(f"error: {error}\n")
        return EXIT_USAGE
    except QuadratureError as error:
        sys.stderr.write(f"error: {error}\n")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
