#!/usr/bin/env python3
"""
latspec command-line interface
Essential and discrete spectrum of three-particle lattice operator matrices H(K)
"""

from typing import List, Optional
import argparse
import json
import logging
import sys

from config import settings
from commands.fiber import cmd_fiber
from commands.oracle import cmd_oracle
from commands.spectrum import cmd_spectrum
from commands.sweep import NAMED_PATHS, cmd_sweep
from commands.validate import cmd_validate
from schemas import ErrorResponse
from exceptions import LatspecError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latspec",
        description="Spectral analysis of 3x3 operator matrices on the truncated Fock space over the d-torus",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="Path to the model JSON document")
    common.add_argument("--out", default=None, help="Write the payload to this file instead of stdout")

    subparsers.add_parser("validate", help="Check a model document", parents=[common])

    fiber = subparsers.add_parser("fiber", help="Spectrum of the fiber operator h(K, k)", parents=[common])
    fiber.add_argument("--K", default=None, help="Total momentum, comma-separated reals (default origin)")
    fiber.add_argument("--k", default=None, help="Fiber momentum, comma-separated reals (default origin)")
    fiber.add_argument("--n-quad", type=int, default=settings.DEFAULT_N_QUAD)

    spectrum = subparsers.add_parser("spectrum", help="Essential and discrete spectrum of H(K)", parents=[common])
    spectrum.add_argument("--K", default=None)
    spectrum.add_argument("--n-quad", type=int, default=settings.DEFAULT_N_QUAD)
    spectrum.add_argument("--n-k", type=int, default=settings.DEFAULT_N_K)
    spectrum.add_argument("--window", default=None, help="Search window lo:hi for discrete eigenvalues")

    sweep = subparsers.add_parser("sweep", help="Spectrum of H(K) along a path of total momenta", parents=[common])
    sweep.add_argument("--path", choices=NAMED_PATHS, default=None)
    sweep.add_argument("--K-path", default=None, help="Explicit points 'a,b;c,d'")
    sweep.add_argument("--n-path", type=int, default=settings.DEFAULT_PATH_POINTS)
    sweep.add_argument("--n-quad", type=int, default=settings.DEFAULT_N_QUAD)
    sweep.add_argument("--n-k", type=int, default=settings.DEFAULT_N_K)
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")

    oracle = subparsers.add_parser("oracle", help="Compare the analytic spectrum with a dense discretization", parents=[common])
    oracle.add_argument("--K", default=None)
    oracle.add_argument("--n-oracle", type=int, default=settings.DEFAULT_N_ORACLE)
    oracle.add_argument("--ess-tol", type=float, default=settings.ESS_TOL)
    oracle.add_argument("--disc-tol", type=float, default=settings.DISC_TOL)
    oracle.add_argument("--sigma-shift", type=float, default=0.0, help="Shift Σ_K before comparing")
    oracle.add_argument("--dump-eigs", default=None, help="Write oracle eigenvalues to this CSV file")

    return parser


def dispatch(args: argparse.Namespace):
    if args.command == "validate":
        return cmd_validate(args.model)
    if args.command == "fiber":
        return cmd_fiber(args.model, args.K, args.k, args.n_quad)
    if args.command == "spectrum":
        return cmd_spectrum(args.model, args.K, args.n_quad, args.n_k, args.window)
    if args.command == "sweep":
        return cmd_sweep(args.model, args.path, args.K_path, args.n_path, args.n_quad, args.n_k, args.format)
    return cmd_oracle(
        args.model, args.K, args.n_oracle, args.ess_tol, args.disc_tol,
        sigma_shift=args.sigma_shift, dump_eigs=args.dump_eigs,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns 0 success, 1 failed check, 2 input error, 3 numerical failure"""
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)

    try:
        payload, exit_code = dispatch(args)
    except LatspecError as e:
        logger.error(f"{args.command} failed: {e.detail}")
        error = ErrorResponse(error=type(e).__name__, detail=e.detail, code=e.code)
        sys.stderr.write(json.dumps(error.model_dump(), sort_keys=True) + "\n")
        return e.exit_code

    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(payload)
    else:
        sys.stdout.write(payload)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
