"""Command-line entry point"""

import argparse
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from pkgnet import __version__
from pkgnet.commands import SUBCOMMANDS
from pkgnet.config import get_settings
from pkgnet.errors import CheckpointError, ConfigurationError, EditError, EncodingError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILURE = 2
EXIT_INTERRUPTED = 130

INVALID_INPUT = (ValidationError, ConfigurationError, EditError, CheckpointError, EncodingError, FileNotFoundError)


class UsageError(Exception):
    pass


class CommandParser(argparse.ArgumentParser):
    """Reports usage errors as exceptions so they share the validation exit code"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> CommandParser:
    parser = CommandParser(
        prog="pkgnet",
        description="Knowledge-graph reinforcement learning on Sokoban and Pacman grid worlds",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=CommandParser)
    for command in SUBCOMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except SystemExit as e:
        # --help and --version
        return e.code or EXIT_OK
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_INVALID
    except INVALID_INPUT as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INVALID
    except KeyboardInterrupt:
        logger.warning("Interrupted; resumable state was saved at the last episode boundary")
        return EXIT_INTERRUPTED
    except Exception as e:
        logger.exception(f"Command failed: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
