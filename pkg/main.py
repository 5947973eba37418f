#!/usr/bin/env python3
"""
Main entry point for the comb ultrametric tools when run as a script
"""

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Literal, Optional, Sequence

import daiquiri
import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, model_validator
from tqdm import tqdm

from combs.comb import comb_distance
from combs.errors import DomainError, FileFormatError
from config import Settings
from spaces.coalescent import (
    brownian_intensity,
    exponential_lifetime,
    sample_cpp,
    sample_kingman_comb,
    sample_splitting_depths,
    spawn_seeds,
)
from spaces.contour import sphere_comb
from spaces.padic import (
    PRational,
    PSequence,
    chi,
    chi_inverse,
    chi_truncated,
    d_p,
    d_u,
    face_gap,
    fp_value,
    rho_psi,
    v_p,
)
from spaces.ultrametric import (
    UltrametricMatrix,
    comb_from_measured,
    comb_from_ordered,
    matrix_from_comb,
    order_ultrametric,
    visibility_measure,
)
from tools.comb_tools import format_comb_point, format_decimal, parse_comb_point, parse_number, read_comb, write_comb
from tools.contour_tools import read_contour_csv, write_staircase_csv
from tools.document_tools import FigureInput, create_comb_svg, create_contour_svg, create_excursion_report
from tools.matrix_tools import read_matrix_csv, write_matrix_csv
from tools.sample_tools import write_sample_json
from workflow.verification import detect_kind, run_verification

# Load environment variables
load_dotenv()

logger = daiquiri.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2

STOCHASTIC_COMMANDS = {"sample"}


class UsageError(Exception):
    """The command line asks for something that cannot be done."""


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage code on bad arguments."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class CommandSpec(BaseModel):
    """Validated options of one invocation."""
    command: Literal["order", "dist", "sample", "sphere", "padic", "plot", "verify"] = Field(
        ..., description="Subcommand to run"
    )
    seed: Optional[int] = Field(None, ge=0, description="Seed of the random generator")
    precision: int = Field(12, ge=1, le=17, description="Significant digits of decimal output")

    @model_validator(mode="after")
    def require_seed(self) -> "CommandSpec":
        if self.command in STOCHASTIC_COMMANDS and self.seed is None:
            raise ValueError(f"the {self.command} command needs an explicit --seed")
        return self


def parse_args(argv: Optional[Sequence[str]], settings: Settings):
    """Parse command line arguments"""
    parser = CommandParser(prog="comb", description="Comb representations of ultrametric spaces")
    parser.add_argument("--log-level", default=settings.log_level, help="Logging level (default from COMB_LOG_LEVEL)")
    parser.add_argument("--precision", type=int, default=settings.precision, help="Significant digits of decimal output")
    parser.add_argument("--progress", action="store_true", help="Show progress bars")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CommandParser)

    order = commands.add_parser("order", help="Embed an ultrametric matrix in a comb")
    order.add_argument("matrix", help="Matrix CSV")
    order.add_argument("--output", help="Comb file to write")
    order.add_argument("--measured", action="store_true", help="Use the masses row and the fragmentation of balls")
    order.add_argument("--visibility", action="store_true", help="Measured embedding under the visibility measure")

    dist = commands.add_parser("dist", help="Distances between points of a comb")
    dist.add_argument("comb", help="Comb file")
    dist.add_argument("--points", nargs="+", help="Points as <position> or <position>:<left|right>; rows follow this order")
    dist.add_argument("--order", help="Comma-separated point indices placing point order[k] in gap k")
    dist.add_argument("--exact", action="store_true", help="Read decimals as exact rationals")
    dist.add_argument("--output", help="Matrix CSV to write")

    sample = commands.add_parser("sample", help="Sample a random comb")
    sample.add_argument("kind", choices=["kingman", "cpp", "splitting"])
    sample.add_argument("--seed", type=int, help="Seed of the random generator (required)")
    sample.add_argument("--n", type=int, default=10, help="Lineages (kingman) or teeth (splitting)")
    sample.add_argument("--T", type=float, default=1.0, help="Truncation height")
    sample.add_argument("--epsilon", type=float, default=0.1, help="Cutoff on atom heights (cpp)")
    sample.add_argument("--birth-rate", type=float, default=1.0, help="Jump rate (splitting)")
    sample.add_argument("--lifetime-rate", type=float, default=1.0, help="Rate of exponential lifetimes (splitting)")
    sample.add_argument("--replicates", type=int, default=1, help="Independent replicates, seeded from --seed")
    sample.add_argument("--output", help="Comb file to write")
    sample.add_argument("--json", help="Sample JSON to write (cpp)")

    sphere = commands.add_parser("sphere", help="Comb of the sphere of a tree contour")
    sphere.add_argument("contour", help="Contour CSV")
    sphere.add_argument("--level", required=True, help="Radius T")
    sphere.add_argument("--epsilon", default="0", help="Cutoff on tooth heights")
    sphere.add_argument("--exact", action="store_true", help="Read decimals as exact rationals")
    sphere.add_argument("--output", help="Comb file to write")
    sphere.add_argument("--report", help="Markdown excursion report to write")
    sphere.add_argument("--staircase", help="Staircase CSV to write")

    padic = commands.add_parser("padic", help="p-adic distances and comb images")
    padic.add_argument("p", type=int, help="Prime (base for sequence queries)")
    queries = padic.add_subparsers(dest="query", required=True, parser_class=CommandParser)
    query = queries.add_parser("dist", help="p-adic distance")
    query.add_argument("a")
    query.add_argument("b")
    query = queries.add_parser("valuation", help="p-adic valuation")
    query.add_argument("q")
    query = queries.add_parser("chi", help="Image in the comb of F_p")
    query.add_argument("q")
    query.add_argument("--digits", type=int, help="Hensel digits kept for infinite expansions")
    query = queries.add_parser("chi-inverse", help="p-adic number of a comb point")
    query.add_argument("point", help="<position> or <position>:<left|right>")
    query.add_argument("--digits", type=int, help="Digits kept for infinite expansions")
    query = queries.add_parser("gap", help="Difference between the preimages of both faces")
    query.add_argument("t")
    query = queries.add_parser("fp", help="Height of F_p")
    query.add_argument("t")
    query = queries.add_parser("digits", help="Reversed Hensel digits")
    query.add_argument("q")
    query = queries.add_parser("udist", help="Distance between two digit strings")
    query.add_argument("x")
    query.add_argument("y")

    plot = commands.add_parser("plot", help="SVG figure of a comb or a contour")
    plot.add_argument("file", help="Comb file or contour CSV")
    plot.add_argument("--dendrogram", action="store_true", help="Overlay the ultrametric tree of the comb")
    plot.add_argument("--level", type=float, help="Level line over a contour")
    plot.add_argument("--output", help="SVG file to write")

    verify = commands.add_parser("verify", help="Check the invariants of a file")
    verify.add_argument("file", help="Comb file, matrix CSV or contour CSV")
    verify.add_argument("--level", type=float, help="Also check the sphere of this radius (contours)")
    verify.add_argument("--spot-checks", type=int, default=200, help="Random quadruples for the four-point check")
    verify.add_argument("--seed", type=int, default=0, help="Seed of the spot checks")

    return parser.parse_args(argv)


def setup_logging(level: str) -> None:
    log_output = daiquiri.output.Stream(
        sys.stderr,
        formatter=daiquiri.formatter.ColorFormatter(fmt="[%(levelname)s] %(message)s"),
    )
    daiquiri.setup(level=level.upper(), outputs=[log_output])


def emit(document: str, path: Optional[str]) -> None:
    """Write a document to path, or to stdout when path is None"""
    if path is None:
        sys.stdout.write(document)
    else:
        Path(path).write_text(document)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise FileFormatError(f"not a rational number: {text!r}") from e


def cmd_order(args, spec: CommandSpec, settings: Settings) -> int:
    matrix = read_matrix_csv(args.matrix)
    if args.visibility:
        matrix = matrix.with_masses(visibility_measure(matrix))
    if args.measured or args.visibility:
        comb, intervals = comb_from_measured(matrix)
        emit(write_comb(comb, None, spec.precision), args.output)
        for point, (start, end) in enumerate(intervals):
            print(f"interval {point} {format_decimal(start, spec.precision)} {format_decimal(end, spec.precision)}")
        return EXIT_OK

    order = order_ultrametric(matrix)
    comb = comb_from_ordered(matrix, order)
    emit(write_comb(comb, None, spec.precision), args.output)
    print("order " + ",".join(str(i) for i in order))
    return EXIT_OK


def cmd_dist(args, spec: CommandSpec, settings: Settings) -> int:
    comb = read_comb(args.comb, exact=args.exact)
    if args.points:
        points = [parse_comb_point(text) for text in args.points]
        distances = [[float(comb_distance(comb, a, b)) for b in points] for a in points]
        emit(write_matrix_csv(UltrametricMatrix(distances), None, spec.precision), args.output)
        return EXIT_OK

    matrix = matrix_from_comb(comb, comb.gap_representatives())
    if args.order:
        try:
            order = [int(label) for label in args.order.split(",")]
        except ValueError as e:
            raise UsageError("--order takes comma-separated point indices") from e
        if sorted(order) != list(range(matrix.n)):
            raise UsageError(f"--order must be a permutation of 0..{matrix.n - 1}")
        # point order[k] sits in gap k
        slots = [0] * matrix.n
        for slot, point in enumerate(order):
            slots[point] = slot
        matrix = UltrametricMatrix(matrix.distances[np.ix_(slots, slots)])
    emit(write_matrix_csv(matrix, None, spec.precision), args.output)
    return EXIT_OK


def _replicate_path(path: Optional[str], k: int, replicates: int) -> Optional[str]:
    if path is None or replicates == 1:
        return path
    target = Path(path)
    return str(target.with_name(f"{target.stem}-{k}{target.suffix}"))


def cmd_sample(args, spec: CommandSpec, settings: Settings) -> int:
    if args.replicates < 1:
        raise UsageError("--replicates must be at least 1")
    if args.replicates > 1 and args.output is None:
        raise UsageError("several replicates need an --output file name")
    seeds = [spec.seed] if args.replicates == 1 else spawn_seeds(spec.seed, args.replicates)
    if args.progress:
        seeds = tqdm(seeds, desc=f"sampling {args.kind}", unit="comb")

    for k, seed in enumerate(seeds):
        sample = None
        if args.kind == "kingman":
            comb = sample_kingman_comb(args.n, seed)
        elif args.kind == "cpp":
            comb, sample = sample_cpp(args.T, args.epsilon, brownian_intensity(), seed)
        else:
            comb = sample_splitting_depths(args.T, args.birth_rate, exponential_lifetime(args.lifetime_rate), args.n, seed)
        logger.info("replicate %d: %d teeth", k, len(comb))
        emit(write_comb(comb, None, spec.precision), _replicate_path(args.output, k, args.replicates))
        if sample is not None and args.json:
            write_sample_json(sample, _replicate_path(args.json, k, args.replicates))
    return EXIT_OK


def cmd_sphere(args, spec: CommandSpec, settings: Settings) -> int:
    contour = read_contour_csv(args.contour, exact=args.exact)
    level = parse_number(args.level, exact=args.exact)
    epsilon = parse_number(args.epsilon, exact=args.exact)
    comb, excursions, local_time = sphere_comb(contour, level, epsilon)
    emit(write_comb(comb, None, spec.precision), args.output)
    if args.report:
        report = create_excursion_report(comb, excursions, local_time, epsilon, spec.precision)
        Path(args.report).write_text(report["document"])
    if args.staircase:
        write_staircase_csv(local_time, args.staircase, spec.precision)
    return EXIT_OK


def cmd_padic(args, spec: CommandSpec, settings: Settings) -> int:
    p = args.p
    if args.query == "dist":
        result = str(d_p(PRational(p, parse_rational(args.a)), PRational(p, parse_rational(args.b))))
    elif args.query == "valuation":
        result = str(v_p(PRational(p, parse_rational(args.q))))
    elif args.query == "chi":
        q = PRational(p, parse_rational(args.q))
        if q.finite_hensel:
            result = format_comb_point(chi(q))
        elif args.digits is None:
            raise UsageError(f"{q.value} has infinitely many {p}-adic digits; give --digits")
        else:
            image = chi_truncated(q, args.digits)
            result = f"{image.position} +{image.error_bound}"
    elif args.query == "chi-inverse":
        result = str(chi_inverse(parse_comb_point(args.point), p, args.digits))
    elif args.query == "gap":
        result = str(face_gap(parse_rational(args.t), p))
    elif args.query == "fp":
        result = str(fp_value(parse_rational(args.t), p))
    elif args.query == "digits":
        result = rho_psi(PRational(p, parse_rational(args.q))).format()
    else:
        x, y = PSequence.parse(args.x), PSequence.parse(args.y)
        if x.p != p or y.p != p:
            raise UsageError(f"digit strings are not in base {p}")
        result = str(d_u(x, y))
    print(result)
    return EXIT_OK


def cmd_plot(args, spec: CommandSpec, settings: Settings) -> int:
    figure = FigureInput(
        width=settings.svg_width,
        height=settings.svg_height,
        dendrogram=args.dendrogram,
        level=args.level,
    )
    kind = detect_kind(args.file)
    if kind == "comb":
        result = create_comb_svg(read_comb(args.file), figure.width, figure.height, figure.dendrogram)
    elif kind == "contour":
        result = create_contour_svg(read_contour_csv(args.file), figure.width, figure.height, figure.level)
    else:
        raise UsageError("plot takes a comb file or a contour CSV")
    emit(result["document"], args.output)
    return EXIT_OK


def cmd_verify(args, spec: CommandSpec, settings: Settings) -> int:
    state = run_verification(args.file, args.level, args.spot_checks, spec.seed, args.progress)
    sys.stdout.write(state.report()["document"])
    return EXIT_OK if state.ok else EXIT_DOMAIN


COMMANDS: Dict[str, Callable[..., int]] = {
    "order": cmd_order,
    "dist": cmd_dist,
    "sample": cmd_sample,
    "sphere": cmd_sphere,
    "padic": cmd_padic,
    "plot": cmd_plot,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main function running one subcommand; returns the exit code"""
    try:
        settings = Settings.from_env()
    except ValidationError as e:
        print(f"error: invalid environment: {e}", file=sys.stderr)
        return EXIT_USAGE
    args = parse_args(argv, settings)
    setup_logging(args.log_level)

    try:
        spec = CommandSpec(
            command=args.command,
            seed=getattr(args, "seed", None),
            precision=args.precision,
        )
    except ValidationError as e:
        print(f"error: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[spec.command](args, spec, settings)
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except (FileFormatError, UsageError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
