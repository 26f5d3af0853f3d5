"""
Lightweight CLI entry point for lava-sysid.

Argument parsing lives here and imports nothing numerical, so --help and
--version stay fast; the command handlers in commands.py are loaded only
once a subcommand runs.
"""

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__


def _common_dims(parser: argparse.ArgumentParser):
    parser.add_argument("--n-u", type=int, default=2, help="input channel count (default 2)")
    parser.add_argument("--n-y", type=int, default=2, help="output channel count (default 2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lava-sysid",
        description="Recursive nonlinear system identification with sparse latent variables",
    )
    parser.add_argument("--version", action="version", version=f"lava-sysid {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    gen = commands.add_parser("gen", help="generate a benchmark dataset")
    gen.add_argument("--system", choices=["saturation"], default="saturation")
    gen.add_argument("--amplitude", type=float, required=True, help="RS(A) amplitude A")
    gen.add_argument("--samples", type=int, required=True, help="record length N")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--base-period", type=int, default=5, help="samples per PRBS level")
    gen.add_argument("--noise-variance", type=float, default=2.5e-3)
    gen.add_argument("--saturation-level", type=float, default=2.0)
    gen.add_argument("--out", required=True, help="output CSV path")

    fit = commands.add_parser("fit", help="identify a model from a data CSV")
    fit.add_argument("--data", required=True)
    _common_dims(fit)
    fit.add_argument("--na", type=int, required=True, help="output lag count n_a")
    fit.add_argument("--nb", type=int, required=True, help="input lag count n_b")
    fit.add_argument("--M", type=int, required=True, help="basis functions per dimension")
    fit.add_argument("--solver", choices=["lava-r", "arx"], default="lava-r")
    fit.add_argument("--cycles", type=int, default=5, help="coordinate cycles L per sample")
    fit.add_argument("--c", type=float, default=1e4, help="initial RLS gain P(0) = cI")
    fit.add_argument(
        "--mm-iters", type=int, default=0, help="0 selects LAVA-R, k > 0 runs k batch MM steps"
    )
    fit.add_argument("--margin", type=float, default=1.2, help="basis boundary margin")
    fit.add_argument("--out", required=True, help="model JSON path")

    simulate = commands.add_parser("simulate", help="evaluate a model on a data CSV")
    simulate.add_argument("--model", required=True)
    simulate.add_argument("--data", required=True)
    simulate.add_argument("--out", required=True, help="predictions CSV path")
    simulate.add_argument("--metric", choices=["fit", "rmse"], default="fit")
    simulate.add_argument("--mode", choices=["free-run", "one-step"], default="free-run")

    sweep = commands.add_parser("sweep", help="Monte Carlo amplitude sweep (saturation system)")
    sweep.add_argument("--amplitudes", default="0.5,1,2,3,4,5,6,8")
    sweep.add_argument("--mc-runs", type=int, default=20)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--train-samples", type=int, default=1000)
    sweep.add_argument("--val-samples", type=int, default=1000)
    sweep.add_argument("--M", type=int, default=4)
    sweep.add_argument("--cycles", type=int, default=5)
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--out", required=True, help="results CSV path")

    inspect = commands.add_parser("inspect", help="summarize a model JSON")
    inspect.add_argument("--model", required=True)

    return parser


def run(argv: Optional[List[str]] = None):
    """Console script entry point."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    from .commands import dispatch

    sys.exit(dispatch(args))


if __name__ == "__main__":
    run()
