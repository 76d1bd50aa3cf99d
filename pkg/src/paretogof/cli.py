"""Command-line entry point: ``paretogof analyze`` and ``paretogof study``."""
from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .errors import (
    DatasetIOError,
    DegenerateSampleError,
    EmptySampleError,
    NumericalError,
    ParameterDomainError,
    ReplicationError,
    SampleValidationError,
    UnknownTestError,
)
from .estimation import bundled_path
from .stein import DEFAULT_SUP, SupSearchConfig
from .study import StudyConfig, analyze_dataset, emit_table, run_study

EXIT_OK = 0
EXIT_USAGE = 2  # argparse's own code
EXIT_IO = 3
EXIT_VALIDATION = 4
EXIT_NUMERICAL = 5

BUNDLED_PREFIX = "bundled:"


def _sup_from_args(args):
    return SupSearchConfig(
        grid_points=args.sup_grid,
        refine_iterations=args.sup_refine,
        endpoint_epsilon=DEFAULT_SUP.endpoint_epsilon,
        scale=args.sup_scale,
    )


def _add_sup_options(p):
    g = p.add_argument_group("DS2 sup search")
    g.add_argument("--sup-grid", type=int, default=DEFAULT_SUP.grid_points, help="grid points (default %(default)s)")
    g.add_argument("--sup-refine", type=int, default=DEFAULT_SUP.refine_iterations,
                   help="golden-section iterations, 0 for none (default %(default)s)")
    g.add_argument("--sup-scale", choices=("log_t", "s"), default=DEFAULT_SUP.scale,
                   help="grid variable (default %(default)s)")


def build_parser():
    parser = argparse.ArgumentParser(prog="paretogof", description="Goodness-of-fit tests for the Pareto distribution.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="test a dataset against the Pareto family")
    a.add_argument("--data", required=True,
                   help=f"data file, or {BUNDLED_PREFIX}<name> for a bundled dataset (liv_golf_2022, airplane)")
    a.add_argument("--threshold", type=float, default=None, help="keep values >= threshold and divide by it")
    a.add_argument("--tests", default="ds1,ds2,ds3", help="comma-separated test tokens (default %(default)s)")
    a.add_argument("--B", type=int, default=1000, help="bootstrap replicates, 0 for statistics only")
    a.add_argument("--seed", type=int, default=0, help="master seed")
    a.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    _add_sup_options(a)

    s = sub.add_parser("study", help="run a Monte Carlo size/power study from a JSON config")
    s.add_argument("--config", required=True, help="JSON file with keys " + ", ".join(
        ("alternatives", "sample_sizes", "tests", "M", "B", "level", "master_seed", "output_path")))
    s.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    s.add_argument("--format", choices=("csv", "markdown"), default="markdown", help="table printed to stdout")
    _add_sup_options(s)
    return parser


def _run(args):
    sup = _sup_from_args(args)
    if args.command == "analyze":
        if args.threshold is not None and not args.threshold > 0:
            raise ParameterDomainError("--threshold must be positive")
        if args.B < 0:
            raise ParameterDomainError("--B must be >= 0")
        path = args.data
        if path.startswith(BUNDLED_PREFIX):
            path = bundled_path(path[len(BUNDLED_PREFIX):])
        report = analyze_dataset(path, args.threshold, args.tests, args.B, args.seed, sup)
        sys.stdout.write(report.to_text(args.format))
    else:
        if args.workers < 1:
            raise ParameterDomainError("--workers must be >= 1")
        config = StudyConfig.from_json(args.config)
        table = run_study(config, workers=args.workers, sup=sup)
        sys.stdout.write(emit_table(table, args.format))
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return _run(args)
    except DatasetIOError as exc:
        where = f" (line {exc.line})" if exc.line else ""
        print(f"paretogof: I/O error: {exc}{where}", file=sys.stderr)
        return EXIT_IO
    except (ParameterDomainError, EmptySampleError, SampleValidationError, UnknownTestError) as exc:
        print(f"paretogof: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DegenerateSampleError, NumericalError, ReplicationError, ArithmeticError) as exc:
        print(f"paretogof: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
