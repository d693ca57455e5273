import argparse
import logging
from typing import Optional, Sequence

from . import __version__
from .cli.deps import get_context
from .cli.router import include_commands
from .core.config import get_settings
from .core.errors import CredscoreError
from .core.logging import configure_logging

logger = logging.getLogger("credscore")


def get_application() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Credibility scoring of financial social-media forecasts.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (default from settings)")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="<command>")
    include_commands(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = get_application().parse_args(argv)
    configure_logging(args.log_level)
    try:
        ctx = get_context(args)
        status = args.handler(ctx, args)
        ctx.finish()
    except CredscoreError as exc:
        logger.error("%s failed: %s", args.command, exc)
        return 2
    return status
