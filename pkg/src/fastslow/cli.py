"""Command-line driver: ``fastslow <mode> <config> [--out DIR]``.

Exit codes: 0 success, 1 validation error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import Mode, load_config
from .errors import SolverRuntimeError, ValidationError
from .experiments import run_experiment

logger = logging.getLogger("fastslow")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fastslow", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in Mode:
        p = sub.add_parser(mode.value)
        p.add_argument("config", help="flat key=value experiment file")
        p.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        spec = load_config(args.config, args.mode)
        artifacts = run_experiment(spec, args.out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverRuntimeError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    for path in artifacts.files:
        print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
