"""The ``sta`` command line.

    sta design    --input protocols/ii_fast.json --out-dir out/
    sta propagate --input protocols/tt_ramp.json --out-dir out/ --threads 4
    sta raman     --input protocols/raman.json
    sta compare   --input protocols/compare.json --methods ii plain

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 missing section.
"""

import argparse
import asyncio
import logging
import sys
from typing import List, Optional

from sta.dynamics import METHODS
from sta.errors import ShortcutError
from utils.config import get_settings
from utils.error_handling import safe_json_dumps
from utils.logging import configure_logging, log_error

from . import commands
from .protocol_file import load

# Set up logging
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sta", description="Shortcuts to adiabaticity for a harmonic trap.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="Protocol file (JSON)")
    common.add_argument("--out-dir", default=".", help="Directory for CSV and JSON results")
    common.add_argument("--quiet", action="store_true", help="Log warnings only; do not print the summary")
    common.add_argument("--verbose", action="store_true", help="Log at debug level")
    common.add_argument("--log-file", help="Also log to this file (overrides STA_LOG_FILE)")

    subparsers.add_parser("design", parents=[common], help="Tabulate the inverse-engineered protocol")
    for name, text in (("propagate", "Propagate every initial state"), ("compare", "Compare methods side by side")):
        sub = subparsers.add_parser(name, parents=[common], help=text)
        sub.add_argument("--threads", type=int, help="Parallel initial states (overrides STA_THREADS)")
        if name == "compare":
            sub.add_argument("--methods", nargs="+", choices=METHODS, help="Methods to compare")
    subparsers.add_parser("raman", parents=[common], help="Raman feasibility report")
    return parser


async def _dispatch(args: argparse.Namespace, threads: int) -> dict:
    protocol_file = load(args.input)
    if args.command == "design":
        return await commands.cmd_design(protocol_file, args.out_dir)
    if args.command == "propagate":
        return await commands.cmd_propagate(protocol_file, args.out_dir, threads=threads)
    if args.command == "raman":
        return await commands.cmd_raman(protocol_file, args.out_dir)
    return await commands.cmd_compare(protocol_file, args.out_dir, methods=args.methods, threads=threads)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        settings = get_settings()
    except ShortcutError as e:
        print(f"sta: {e}", file=sys.stderr)
        return e.exit_code

    level = settings.level
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    configure_logging(level=level, log_file=args.log_file or settings.log_file)

    threads = getattr(args, "threads", None)
    if threads is None:
        threads = settings.threads
    if threads < 1:
        print("sta: --threads must be a positive integer", file=sys.stderr)
        return EXIT_INVALID

    try:
        payload = asyncio.run(_dispatch(args, threads))
    except ShortcutError as e:
        log_error(logger, e, args.command)
        print(f"sta {args.command}: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure in {args.command}")
        print(f"sta {args.command}: internal error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    if not args.quiet:
        print(safe_json_dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
