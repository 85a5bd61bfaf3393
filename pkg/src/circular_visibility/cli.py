"""Command line interface: validate channels, check visibility, benchmark."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from circular_visibility.cache import CertificateNotFound, SQLite3CertificateCache
from circular_visibility.channel import (
    ChannelFormatError,
    ChannelInvalid,
    load_channel,
)
from circular_visibility.engine import (
    InternalInvariantBroken,
    PointNotInterior,
    query_visibility,
)
from circular_visibility.fixtures import random_channel, random_interior_point
from circular_visibility.geometry import GeometryError
from circular_visibility.render import write_svg
from circular_visibility.structs import Point

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE_ERROR = 2
EXIT_BLOCKED = 3
EXIT_NOT_INTERIOR = 4
EXIT_INTERNAL = 5


def _parse_point(text: str) -> Point:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Expected x,y but got {text!r}.") from e
    return Point(x, y)


def _print_json(obj: object) -> None:
    print(json.dumps(obj, indent=2))


def cmd_validate(args: argparse.Namespace) -> int:
    """Check a channel file and print its diagnostics."""
    try:
        load_channel(args.channel)
    except ChannelInvalid as e:
        diagnostics = [d.to_json() for d in e.diagnostics]
        _print_json({"valid": False, "diagnostics": diagnostics})
        return EXIT_INVALID
    except (OSError, json.JSONDecodeError, ChannelFormatError) as e:
        _print_json({"valid": False, "error": str(e)})
        return EXIT_PARSE_ERROR
    _print_json({"valid": True, "diagnostics": []})
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    """Decide visibility of one point and print the certificate."""
    try:
        ch = load_channel(args.channel)
    except ChannelInvalid as e:
        _print_json({"error": "ChannelInvalid", "message": str(e)})
        return EXIT_INVALID
    except (OSError, json.JSONDecodeError, ChannelFormatError) as e:
        _print_json({"error": "ParseError", "message": str(e)})
        return EXIT_PARSE_ERROR
    p: Point = args.point
    d_tol = ch.default_d_tol() if args.tolerance is None else args.tolerance
    cache = SQLite3CertificateCache(args.cache) if args.cache else None
    try:
        if cache is None:
            raise CertificateNotFound
        cert = cache.try_load_certificate(ch, p, d_tol)
    except CertificateNotFound:
        try:
            cert = query_visibility(ch, p, d_tol)
        except PointNotInterior as e:
            _print_json({"error": "PointNotInterior", "message": str(e)})
            return EXIT_NOT_INTERIOR
        except (InternalInvariantBroken, GeometryError) as e:
            logging.error(f"Query for {p} failed: {e}")
            _print_json({"error": type(e).__name__, "message": str(e)})
            return EXIT_INTERNAL
        if cache is not None:
            cache.save(ch, p, d_tol, cert)
    logging.info(f"{p} is {'visible' if cert.visible else 'blocked'}.")
    if args.json:
        _print_json(cert.to_json())
    else:
        print("visible" if cert.visible else "blocked")
    if args.svg:
        write_svg(args.svg, ch, cert, p)
    return EXIT_OK if cert.visible else EXIT_BLOCKED


def cmd_bench(args: argparse.Namespace) -> int:
    """Time queries on seeded random channels and print CSV rows."""
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["n", "iterations", "micros"])
    for n in args.segments:
        for i in range(args.repeat):
            seed = args.seed + i
            try:
                ch = random_channel(n, seed)
                p = random_interior_point(ch, np.random.default_rng(seed))
                tic = time.perf_counter()
                cert = query_visibility(ch, p)
            except (RuntimeError, InternalInvariantBroken, GeometryError) as e:
                logging.error(f"Benchmark with {n} segments, seed {seed} failed: {e}")
                return EXIT_INTERNAL
            micros = int(1e6 * (time.perf_counter() - tic))
            writer.writerow([n, cert.iterations, micros])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """The argument parser for all subcommands."""
    parser = argparse.ArgumentParser(
        prog="circular-visibility",
        description="Circular visibility of points from the starting arc of a channel.",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="Check a channel file.")
    validate.add_argument("channel", type=Path)
    validate.set_defaults(func=cmd_validate)

    check = sub.add_parser("check", help="Decide visibility of a point.")
    check.add_argument("channel", type=Path)
    check.add_argument("--point", type=_parse_point, required=True)
    check.add_argument("--tolerance", type=float, default=None)
    check.add_argument("--json", action="store_true")
    check.add_argument("--svg", type=Path, default=None)
    check.add_argument("--cache", type=Path, default=None)
    check.set_defaults(func=cmd_check)

    bench = sub.add_parser("bench", help="Benchmark random channels.")
    bench.add_argument("--segments", type=int, nargs="+", default=[100])
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--repeat", type=int, default=1)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line interface and return the exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level))
    return int(args.func(args))


if __name__ == "__main__":
    sys.exit(main())
