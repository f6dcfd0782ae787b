import argparse
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from .config import get_settings
from .errors import RideBathError
from .models.kinds import CommandName
from .schemas.request import RunRequest
from .commands import (
    simulate_command, pool_command, optimality_command,
    sweep_command, convergence_command, replicate_command,
)

logger = logging.getLogger("ridebath")

COMMANDS = {
    cmd.name: cmd
    for cmd in (
        simulate_command, pool_command, optimality_command,
        sweep_command, convergence_command, replicate_command,
    )
}


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="python -m ridebath",
        description="Interactive bathtub simulation of a ride-sourcing city",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS.values():
        sub = subparsers.add_parser(cmd.name.value, help=cmd.help)
        sub.add_argument("scenario", help="scenario file (.scn)")
        sub.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
        sub.add_argument("--out", default="out", help="output directory")
        sub.add_argument("--format", choices=["csv", "json"], default=settings.output_format)
        sub.add_argument("--stride", type=int, default=None, help="base steps between distance snapshots")
        sub.add_argument("--paper-fdm", action="store_true", help="idle-fleet update of the reference pseudocode")
        sub.add_argument("--recompute-cap", action="store_true", help="re-evaluate the admission cap every saturated step")
        for flags, kwargs in cmd.arguments:
            sub.add_argument(*flags, **kwargs)
    return parser


def parse_request(argv: Optional[List[str]] = None) -> RunRequest:
    args = build_parser().parse_args(argv)
    extra = {}
    for name in ("alternatives", "seed", "blocks", "grid"):
        if hasattr(args, name):
            extra[name] = getattr(args, name)
    return RunRequest(
        scenario=args.scenario,
        command=args.command,
        overrides=args.overrides,
        output={"format": args.format, "directory": args.out, "stride": args.stride},
        paper_fdm=args.paper_fdm,
        recompute_cap=args.recompute_cap,
        **extra,
    )


def execute(req: RunRequest) -> int:
    return COMMANDS[CommandName(req.command)].handler(req)


def run(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    settings = get_settings()
    logging.basicConfig(level=settings.log_level, format="%(levelname)s:%(name)s:%(message)s")
    try:
        req = parse_request(argv)
    except ValidationError as exc:
        error = exc.errors()[0]
        logger.error("invalid arguments: %s: %s", ".".join(str(p) for p in error["loc"]), error["msg"])
        return 2
    try:
        return execute(req)
    except RideBathError as exc:
        logger.error("%s", exc)
        return exc.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
