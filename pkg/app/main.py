"""
Command-line application: argument parsing and dispatch to the command handlers
"""
import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from app.config import DEFAULT_SAMPLES, DEFAULT_SEED, DET_BOUND, LOG_LEVEL, OUTPUT_FORMATS, PATH_CAP, THREADS
from app.models import RunConfig
from app.routers import hilbert_router, identity_router, mc_router, verify_router
from app.services.verify_service import SUITES

logger = logging.getLogger(__name__)

COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "hilbert": hilbert_router.cmd_hilbert,
    "verify": verify_router.cmd_verify,
    "mc": mc_router.cmd_mc,
    "identity": identity_router.cmd_identity,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=None, help="truncation order N")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    common.add_argument("--format", default="json", choices=OUTPUT_FORMATS)
    common.add_argument("--path-cap", type=int, default=PATH_CAP)
    common.add_argument("--det-bound", type=int, default=DET_BOUND)
    common.add_argument("--threads", type=int, default=THREADS, help="worker threads for sampling and word counts")

    parser = argparse.ArgumentParser(prog="ncalg", description="Hilbert series of noncommutative complete intersections")
    commands = parser.add_subparsers(dest="command", required=True)

    hilbert = commands.add_parser("hilbert", parents=[common], help="closed-form series of a datum file")
    hilbert.add_argument("inputs", nargs="*", metavar="DATUM")
    hilbert.add_argument("--datum", action="append", default=[])
    hilbert.add_argument("--dims", type=int, nargs="+", default=[], help="dimension vector for the expected Rep dimension")

    verify = commands.add_parser("verify", parents=[common], help="run the bundled acceptance battery")
    verify.add_argument("--suite", default="all", choices=SUITES)

    mc = commands.add_parser("mc", parents=[common], help="Monte Carlo matrix integral of a datum file")
    mc.add_argument("inputs", nargs="*", metavar="DATUM")
    mc.add_argument("--datum", action="append", default=[])
    mc.add_argument("--dims", type=int, nargs="+", default=[])
    mc.add_argument("--divide-lambda", action="store_true", help="estimate zeta/lambda instead of zeta")

    identity = commands.add_parser("identity", parents=[common], help="affine product identity for a quiver file")
    identity.add_argument("inputs", nargs=1, metavar="QUIVER")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=LOG_LEVEL, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = RunConfig(
            command=args.command,
            inputs=list(getattr(args, "inputs", [])) + list(getattr(args, "datum", [])),
            order=args.order,
            seed=args.seed,
            samples=args.samples,
            format=args.format,
            path_cap=args.path_cap,
            det_bound=args.det_bound,
            suite=getattr(args, "suite", "all"),
            dims=getattr(args, "dims", []),
            divide_lambda=getattr(args, "divide_lambda", False),
            threads=args.threads,
        )
    except ValidationError as e:
        print(f"error: {e.errors()[0]['loc'][0]}: {e.errors()[0]['msg']}", file=sys.stderr)
        return 2
    logger.info(f"🚀 ncalg {config.command}")
    return COMMANDS[config.command](config)
