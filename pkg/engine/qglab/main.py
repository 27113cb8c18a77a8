"""qglab entry point: one argparse subcommand per command module."""
import argparse
import sys

import structlog

from . import __version__
from .api.commands import report, stage, verify
from .config import get_settings
from .core.errors import ConfigError, QGLabError
from .core.logging import configure_logging

logger = structlog.get_logger(__name__)


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qglab",
        description="Convex-integration lab for the 3D quasi-geostrophic and 2D Euler systems",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    verify.register(subparsers)
    stage.register(subparsers)
    report.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Exit codes: 0 all checks pass, 1 an invariant or assumption failed, 2 bad config or usage."""
    settings = get_settings()
    configure_logging(settings.log_level, settings.log_json)
    args = create_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except QGLabError as e:
        logger.error("command.failed", command=args.command, assumption=e.assumption, error=str(e))
        print(f"{e.assumption}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
