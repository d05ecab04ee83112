"""
Main entrypoint for the gausstail command-line tool.
"""
import logging
import sys
from typing import Optional, Sequence

from rich.console import Console
from rich.logging import RichHandler

from cli import UsageError, build_parser, run
from core.cli_strings import EXIT_CONFIG_ERROR, EXIT_INPUT_ERROR, EXIT_OK
from core.config import ConfigError
from expansion.kernels import ExpansionError
from geometry.planar import GeometryError
from oracle.grid import OracleError
from simulation.field import DomainSizeError, SimulationError


# Checked in order: DomainSizeError before its SimulationError base.
EXIT_CODES = (
    (DomainSizeError, EXIT_CONFIG_ERROR),
    (ConfigError, EXIT_CONFIG_ERROR),
    (OracleError, EXIT_CONFIG_ERROR),
    (GeometryError, EXIT_INPUT_ERROR),
    (ExpansionError, EXIT_INPUT_ERROR),
    (SimulationError, EXIT_INPUT_ERROR),
    (UsageError, EXIT_INPUT_ERROR),
)


def setup_logging(verbose: bool = False):
    """Set up logging on stderr, so stdout carries only command output."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(name)s - %(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def exit_code_for(error: BaseException) -> Optional[int]:
    for kind, code in EXIT_CODES:
        if isinstance(error, kind):
            return code
    return None


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the command and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage and 0 on --help
        return EXIT_INPUT_ERROR if e.code not in (0, None) else EXIT_OK

    setup_logging(args.verbose)
    logger = logging.getLogger(__name__)
    logger.debug(f"Running {args.command}")

    try:
        return run(args)
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_INPUT_ERROR
    except Exception as e:
        code = exit_code_for(e)
        if code is None:
            logger.error(f"Unexpected error: {e}")
            raise
        logger.error(f"{type(e).__name__}: {e}")
        return code
    finally:
        logger.debug(f"{args.command} finished")


if __name__ == "__main__":
    sys.exit(main())
