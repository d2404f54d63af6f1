# -*- coding: utf-8 -*-
import argparse
import logging
import sys
from typing import List, Optional

from .. import __version__, config, setup_logging
from ..exceptions import HopfError
from . import bench, evaluate, projection, slices

logger = logging.getLogger(__name__)

# Коды возврата
EXIT_OK = 0
EXIT_NONCONVERGED = 1
EXIT_ERROR = 2


def init_commands(subparsers):
    """Регистрирует все подкоманды."""
    evaluate.add_parser(subparsers)
    slices.add_parser(subparsers)
    projection.add_parser(subparsers)
    bench.add_parser(subparsers)


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopfeval",
        description="Grid-free Hamilton-Jacobi evaluation via the Hopf formula",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level", default=config.LOG_LEVEL, help="logging level (default: %(default)s)"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    init_commands(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level.upper())

    try:
        return args.handler(args)
    except HopfError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
